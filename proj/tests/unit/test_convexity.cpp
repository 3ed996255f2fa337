#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include "synthetic_wcs.hpp"

#include "convexeff/convexity.hpp"
#include "convexeff/error.hpp"
#include "convexeff/generators.hpp"
#include "convexeff/hull.hpp"
#include "convexeff/wcs.hpp"

#include <cmath>
#include <numeric>

using namespace convexeff;
using namespace convexeff::testing;

namespace {

const wcs::Dataset& fixture() {
  static const wcs::Dataset data = [] {
    const std::string dir = convexeff::testing::make_temp_dir("convexity-unit");
    convexeff::testing::write_synthetic_wcs(dir);
    return wcs::load_wcs(wcs::DataFiles::in(dir));
  }();
  return data;
}

Universe line_universe(std::size_t n) {
  Matrix c(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index i = 0; i < c.rows(); ++i) c.row(i) << 2.0 * static_cast<double>(i), 1.0, -3.0;
  return Universe(c);
}

}  // namespace

TEST_SUITE("convexity") {

TEST_CASE("hull shapes") {
  Matrix one(1, 3);
  one << 1, 2, 3;
  const Hull h0 = convex_hull(one);
  CHECK(h0.rank() == 0);
  CHECK(h0.contains(Eigen::Vector3d(1, 2, 3)));
  CHECK(!h0.contains(Eigen::Vector3d(1, 2, 3.1)));

  Matrix tet(4, 3);
  tet << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;
  const Hull h3 = convex_hull(tet);
  CHECK(h3.rank() == 3);
  CHECK(h3.facets().size() == 4);
  CHECK(h3.vertices().size() == 4);

  Matrix cube(9, 3);
  for (int i = 0; i < 8; ++i) cube.row(i) << (i & 1), (i >> 1 & 1), (i >> 2 & 1);
  cube.row(8) << 0.5, 0.5, 0.5;
  const Hull hc = convex_hull(cube);
  CHECK(hc.vertices().size() == 8);
  CHECK(std::find(hc.vertices().begin(), hc.vertices().end(), 8U) == hc.vertices().end());
  CHECK(hc.contains(Eigen::Vector3d(0.5, 0.5, 0.5)));
  // Just inside and just outside each face of the cube.
  for (int axis = 0; axis < 3; ++axis) {
    for (double side : {0.0, 1.0}) {
      Eigen::Vector3d z(0.5, 0.5, 0.5);
      z[axis] = side + (side == 0.0 ? 1e-3 : -1e-3);
      CHECK(hc.contains(z));
      z[axis] = side + (side == 0.0 ? -1e-3 : 1e-3);
      CHECK(!hc.contains(z));
    }
  }
}

TEST_CASE("membership agrees with the convex-combination oracle on 200 random cases") {
  Rng rng(77);
  int inside = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int rank = trial % 10 == 0 ? 1 : (trial % 5 == 0 ? 2 : 3);
    const Eigen::Index n = rank == 1 ? 2 + static_cast<Eigen::Index>(rng.below(4)) : 4 + static_cast<Eigen::Index>(rng.below(6));
    const Matrix pts = random_points(rng, n, rank);
    const Hull hull = convex_hull(pts);
    CHECK(hull.rank() == rank);
    // Queries: a random convex combination, an input point, and a random
    // point (in the span for degenerate sets).
    std::vector<Eigen::VectorXd> queries;
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = rng.uniform();
    queries.push_back(pts.transpose() * (w / w.sum()));
    queries.push_back(pts.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)))).transpose());
    Eigen::VectorXd a(n);
    for (Eigen::Index i = 0; i < n; ++i) a[i] = rng.uniform(-1, 1);
    a /= a.sum() != 0.0 ? a.sum() : 1.0;
    queries.push_back(pts.transpose() * a);  // affine combination: in the span, often outside
    queries.push_back(Eigen::Vector3d(rng.uniform(-12, 12), rng.uniform(-12, 12), rng.uniform(-12, 12)));
    for (const auto& z : queries) {
      const bool expected = convex_combination(pts, z, 1e-7 * hull.scale());
      CHECK(hull.contains(z) == expected);
      inside += expected;
    }
  }
  CHECK(inside > 400);  // both outcomes exercised
  CHECK(inside < 800);
}

TEST_CASE("membership counts on a universe") {
  const auto& u = fixture().universe;
  std::vector<std::size_t> all(u.size());
  std::iota(all.begin(), all.end(), 0);
  CHECK(hull_membership_count(convex_hull(u.coords()), u) == u.size());
  CHECK(hull_membership_count(convex_hull(select_rows(u.coords(), {17})), u) == 1);

  const Universe line = line_universe(3);
  CHECK(hull_membership_count(convex_hull(select_rows(line.coords(), {0, 2})), line) == 3);
}

TEST_CASE("category consistency examples") {
  const Universe line = line_universe(3);
  const HardPartition split({0, 1, 0});
  CHECK(category_consistency(split, 0, line) == doctest::Approx(2.0 / 3.0));
  CHECK(category_consistency(split, 1, line) == 1.0);
  CHECK(system_consistency(split, line) == doctest::Approx((2.0 * 2.0 / 3.0 + 1.0) / 3.0));
  CHECK(system_consistency(HardPartition(std::vector<int>(3, 0)), line) == 1.0);

  const auto& u = fixture().universe;
  std::vector<int> singles(u.size());
  std::iota(singles.begin(), singles.end(), 0);
  CHECK(system_consistency(HardPartition(singles), u) == 1.0);
  CHECK(system_consistency(HardPartition(std::vector<int>(u.size(), 0)), u) == 1.0);
}

TEST_CASE("voronoi partitions score 1 and interleavings score below 1") {
  const auto& u = fixture().universe;
  Rng rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t k = 2 + rng.below(15);
    Matrix ex(static_cast<Eigen::Index>(k), 3);
    for (Eigen::Index i = 0; i < ex.rows(); ++i)
      ex.row(i) = u.coords().row(static_cast<Eigen::Index>(rng.below(u.size())));
    const HardPartition p = gen::voronoi_partition(ex, u);
    CHECK(std::abs(system_consistency(p, u) - 1.0) <= 1e-9);
    for (std::size_t w = 0; w < p.word_count(); ++w) CHECK(category_consistency(p, static_cast<int>(w), u) == 1.0);
  }

  // Checkerboard over grid rows and columns.
  std::vector<int> checker(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) checker[i] = (u.grid(i)->row + u.grid(i)->col) % 2;
  const double c = system_consistency(HardPartition(checker), u);
  CHECK(c > 0.0);
  CHECK(c < 1.0);
}

TEST_CASE("hull counts bound extensions; labels and isometries do not matter") {
  const auto& u = fixture().universe;
  Rng rng(29);
  Eigen::Matrix3d rot = Eigen::Quaterniond(0.3, -0.8, 0.2, 0.4).normalized().toRotationMatrix();
  Matrix moved = u.coords() * rot.transpose();
  moved.rowwise() += Eigen::RowVector3d(5.0, -7.0, 11.0);
  std::vector<std::optional<GridPos>> grid;
  for (std::size_t i = 0; i < u.size(); ++i) grid.push_back(u.grid(i));
  const Universe v(moved, grid);

  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t k = 2 + rng.below(6);
    std::vector<int> assign(u.size());
    for (auto& a : assign) a = static_cast<int>(rng.below(k));
    const HardPartition p(assign);
    for (std::size_t w = 0; w < p.word_count(); ++w) {
      const auto ext = category_extension(p, static_cast<int>(w));
      const auto count = hull_membership_count(convex_hull(select_rows(u.coords(), ext)), u);
      CHECK(count >= ext.size());
      CHECK((count == ext.size()) == (category_consistency(p, static_cast<int>(w), u) == 1.0));
    }
    std::vector<int> relabeled(assign);
    for (auto& a : relabeled) a = static_cast<int>(k) - 1 - a;
    const double s = system_consistency(p, u);
    CHECK(s > 0.0);
    CHECK(s <= 1.0);
    CHECK(system_consistency(HardPartition(relabeled), u) == doctest::Approx(s).epsilon(1e-14));
    CHECK(system_consistency(p, v) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("achromatic chips can be excluded") {
  const auto& u = fixture().universe;
  // Achromatic chips in one category, everything else in another.
  std::vector<int> assign(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) assign[i] = wcs::is_achromatic(u, i) ? 0 : 1;
  const HardPartition p(assign);
  ConvexityOptions without;
  without.include_achromatic = false;
  CHECK(system_consistency(p, u, without) == doctest::Approx(category_consistency(p, 1, u, without)));
  CHECK_THROWS_AS(category_consistency(p, 0, u, without), InvalidArgument);
  // The gray axis runs through the chromatic hull.
  CHECK(category_consistency(p, 1, u) < 1.0);
}

}  // TEST_SUITE
