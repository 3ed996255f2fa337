#include "doctest.h"
#include "helpers.hpp"

#include "convexeff/circle.hpp"
#include "convexeff/error.hpp"
#include "convexeff/ib.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace convexeff;

namespace {

// Arc count by scanning for label changes, independent of the run counter.
std::size_t arcs_by_boundaries(const std::vector<int>& assign, int word) {
  std::size_t starts = 0;
  for (std::size_t i = 0; i < assign.size(); ++i)
    if (assign[i] == word && (i == 0 || assign[i - 1] != word)) ++starts;
  return starts;
}

std::vector<int> random_convex_assign(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> cuts;
  while (cuts.size() + 1 < k) {
    const std::size_t c = 1 + rng.below(n - 1);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> a(n);
  std::size_t w = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (w < cuts.size() && i >= cuts[w]) ++w;
    a[i] = static_cast<int>(w);
  }
  return a;
}

}  // namespace

TEST_SUITE("circle") {

TEST_CASE("universe and similarity meanings") {
  CHECK_THROWS_AS(circle::circle_universe(10), InvalidArgument);
  const Universe u = circle::circle_universe(360);
  CHECK(u.size() == 360);
  CHECK(u.coords()(90, 0) == doctest::Approx(std::numbers::pi / 2));
  const MeaningModel m = circle::similarity_meanings(u);
  const Matrix& mm = m.m();
  for (Eigen::Index t = 0; t < mm.rows(); ++t) CHECK(mm.row(t).sum() == doctest::Approx(1.0).epsilon(1e-12));
  // Rows t and t + pi coincide exactly; no other rows do.
  CHECK((mm.row(0).array() == mm.row(180).array()).all());
  CHECK((mm.row(90).array() == mm.row(270).array()).all());
  for (Eigen::Index t = 1; t < 180; ++t) CHECK((mm.row(0) - mm.row(t)).cwiseAbs().maxCoeff() > 1e-12);
  // Symmetric about the target, peaked at 0 and pi, flat-bottomed at pi/2.
  for (Eigen::Index d = 1; d < 180; ++d) CHECK(mm(0, d) == mm(0, 360 - d));
  CHECK(mm(0, 0) / mm(0, 90) == doctest::Approx(std::exp(1.0)));
  CHECK_THROWS_AS(circle::similarity_meanings(u, 0.0), InvalidArgument);
}

TEST_CASE("arc counts") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> a(24);
    for (auto& x : a) x = static_cast<int>(rng.below(3));
    const HardPartition p(a);
    bool convex = true;
    for (std::size_t w = 0; w < p.word_count(); ++w) {
      const std::size_t arcs = circle::arc_count(p, static_cast<int>(w));
      CHECK(arcs == arcs_by_boundaries(p.assign(), static_cast<int>(w)));
      if (arcs != 1) convex = false;
    }
    CHECK(circle::is_segment_convex(p) == convex);
  }
  // Wrapping runs count twice on the segment.
  const HardPartition wrap(std::vector<int>{0, 0, 1, 1, 0});
  CHECK(circle::arc_count(wrap, 0) == 2);
  CHECK_FALSE(circle::is_segment_convex(wrap));
}

TEST_CASE("the certainty world makes a convex system uninformative") {
  Rng rng(12);
  for (std::size_t k : {2u, 4u, 8u}) {
    for (int trial = 0; trial < 20; ++trial) {
      const HardPartition p(random_convex_assign(360, k, rng));
      const auto w = circle::theorem2_construction(p);
      CHECK(std::abs(w.p_scores.accuracy) <= 1e-12);
      CHECK(std::abs(w.q_scores.accuracy - std::log2(static_cast<double>(k))) <= 1e-9);
      CHECK(std::abs(w.q_closed_form - w.q_scores.accuracy) <= 1e-9);
      CHECK(circle::is_segment_convex(w.q));
      CHECK(w.q.word_count() == k);
      CHECK(w.support.size() % k == 0);
      for (std::size_t u : w.support) CHECK(p.assign()[u] == w.source_word);
    }
  }
  CHECK_THROWS_AS(circle::theorem2_construction(HardPartition(std::vector<int>{0, 1, 0, 1})), InvalidArgument);
  CHECK_THROWS_AS(circle::theorem2_construction(HardPartition(random_convex_assign(12, 2, rng)), 0.0),
                  InvalidArgument);
}

TEST_CASE("closed-form certainty accuracy agrees with the general score") {
  Rng rng(21);
  const std::size_t n = 48;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng.below(6);
    std::vector<int> qa(n);
    for (auto& x : qa) x = static_cast<int>(rng.below(k));
    const HardPartition q(qa);
    const std::size_t lo = rng.below(n / 2);
    const std::size_t len = 1 + rng.below(n - lo);
    std::vector<std::size_t> support;
    Vector w = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = lo; i < lo + len; ++i) {
      support.push_back(i);
      w(static_cast<Eigen::Index>(i)) = 1.0;
    }
    const MeaningModel mm = circle::certainty_meanings(n, Prior::from_weights(w));
    CHECK(circle::certainty_accuracy_closed_form(q, support) ==
          doctest::Approx(accuracy(q.to_system(), mm)).epsilon(1e-10));
  }
}

TEST_CASE("a non-convex optimum exists under the sharper kernel") {
  const Universe u = circle::circle_universe(72);
  const MeaningModel m = circle::similarity_meanings(u, 2.0);
  circle::NonconvexSearch search;
  search.anneal.init_words = 2;
  const auto res = circle::find_nonconvex_optimum(m, search);
  REQUIRE(res.found);
  CHECK(res.beta >= 5.0);
  CHECK(res.beta <= 15.0);
  CHECK(res.categories == 2);
  for (std::size_t a : res.arcs) CHECK(a >= 2);
  CHECK(res.mirror_gap <= 1e-9);
  REQUIRE(res.solution.has_value());
  CHECK(self_consistency_gap(*res.solution, m) < 1e-6);

  // No random two-word start converges to a better fixed point at this beta.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const IBSolution other = ba_fixed_point(m, res.beta, random_encoder(u.size(), 2, seed));
    CHECK(other.objective >= res.solution->objective - 1e-9);
  }

  std::ostringstream csv;
  circle::write_encoder_csv(csv, u, res.solution->encoder);
  CHECK(csv.str().rfind("angle_rad,q_", 0) == 0);
}

}  // TEST_SUITE
