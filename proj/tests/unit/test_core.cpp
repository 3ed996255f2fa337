#include "doctest.h"
#include "helpers.hpp"

#include "convexeff/core.hpp"
#include "convexeff/error.hpp"

#include <algorithm>
#include <numeric>

using namespace convexeff;
using convexeff::testing::identity;
using convexeff::testing::random_system;

TEST_SUITE("core") {

TEST_CASE("mode partition of the identity encoder is all singletons") {
  const HardPartition p = mode_partition(NamingSystem(identity(6)));
  CHECK(p.word_count() == 6);
  for (std::size_t w = 0; w < 6; ++w) CHECK(category_extension(p, static_cast<int>(w)).size() == 1);
}

TEST_CASE("mode partition ties go to the lowest word") {
  Matrix q = Matrix::Constant(5, 2, 0.5);
  const HardPartition p = mode_partition(NamingSystem(q));
  CHECK(p.word_count() == 1);
  CHECK(p.words()[0] == "0");
  for (int a : p.assign()) CHECK(a == 0);
}

TEST_CASE("mode partition picks the unique argmax") {
  Matrix q(1, 3);
  q << 0.2, 0.7, 0.1;
  const HardPartition p = mode_partition(NamingSystem(q, {"a", "b", "c"}));
  REQUIRE(p.word_count() == 1);
  CHECK(p.words()[0] == "b");
}

TEST_CASE("category extension") {
  const HardPartition one(std::vector<int>(4, 0));
  CHECK(category_extension(one, 0) == std::vector<std::size_t>{0, 1, 2, 3});

  const HardPartition singles({0, 1, 2});
  CHECK(category_extension(singles, 1) == std::vector<std::size_t>{1});

  const HardPartition ab({0, 0, 1}, {"a", "b"});
  CHECK(category_extension(ab, "b") == std::vector<std::size_t>{2});
  CHECK(category_extension(ab, "a") == std::vector<std::size_t>{0, 1});
  CHECK_THROWS_AS(category_extension(ab, "c"), InvalidArgument);
  CHECK_THROWS_AS(category_extension(ab, 5), InvalidArgument);
}

TEST_CASE("unused words are pruned and keep their order") {
  const HardPartition p({2, 2, 0}, {"x", "y", "z"});
  CHECK(p.words() == std::vector<std::string>{"x", "z"});
  CHECK(category_extension(p, "z") == std::vector<std::size_t>{0, 1});
}

TEST_CASE("major category counts") {
  CHECK(count_major_categories(NamingSystem(identity(7))) == 7);
  CHECK(count_major_categories(NamingSystem(Matrix::Constant(7, 4, 0.25))) == 1);
}

TEST_CASE("mode partition is idempotent and bounded by k on random systems") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(20);
    const std::size_t k = 1 + rng.below(8);
    const NamingSystem s = random_system(n, k, rng);
    const HardPartition p = mode_partition(s);
    const HardPartition again = mode_partition(p.to_system());
    CHECK(again.assign() == p.assign());
    CHECK(again.words() == p.words());
    CHECK(count_major_categories(s) <= s.word_count());

    // Extensions are disjoint and cover the referents.
    std::vector<int> seen(n, 0);
    for (std::size_t w = 0; w < p.word_count(); ++w) {
      const auto ext = category_extension(p, static_cast<int>(w));
      CHECK(!ext.empty());
      for (auto t : ext) ++seen[t];
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("probability vectors are validated to 1e-12") {
  Vector p(2);
  p << 0.5, 0.5 + 5e-13;
  CHECK_NOTHROW(Prior{p});
  p << 0.5, 0.5 + 1e-10;
  CHECK_THROWS_AS(Prior{p}, InvalidArgument);
  p << -0.1, 1.1;
  CHECK_THROWS_AS(Prior{p}, InvalidArgument);

  Matrix q(2, 2);
  q << 0.5, 0.5, 0.6, 0.5;
  CHECK_THROWS_AS(NamingSystem{q}, InvalidArgument);
  CHECK_THROWS_AS(MeaningModel(q, Prior::uniform(2)), InvalidArgument);
  CHECK_THROWS_AS(MeaningModel(identity(2), Prior::uniform(3)), InvalidArgument);
}

TEST_CASE("universe grid positions must be unique") {
  Matrix coords = Matrix::Zero(2, 3);
  coords(1, 0) = 1.0;
  CHECK_THROWS_AS(Universe(coords, {GridPos{1, 1}, GridPos{1, 1}}), InvalidArgument);
  const Universe u(coords, {GridPos{1, 1}, GridPos{2, 0}});
  CHECK(u.at(GridPos{2, 0}) == std::optional<std::size_t>{1});
  CHECK(!u.at(GridPos{3, 3}).has_value());
}

}  // TEST_SUITE
