#pragma once

// Small builders shared by the unit tests.

#include "convexeff/core.hpp"
#include "convexeff/rng.hpp"

#include <cstdint>

namespace convexeff::testing {

inline Matrix random_stochastic(std::size_t rows, std::size_t cols, Rng& rng, double floor = 0.0) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = floor + rng.uniform();
    m.row(r) /= m.row(r).sum();
  }
  return m;
}

inline NamingSystem random_system(std::size_t n, std::size_t k, Rng& rng) {
  return NamingSystem(random_stochastic(n, k, rng));
}

// Random strictly positive meanings with a random prior.
inline MeaningModel random_meanings(std::size_t n, Rng& rng) {
  Vector w(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = 0.1 + rng.uniform();
  return MeaningModel(random_stochastic(n, n, rng, 0.05), Prior::from_weights(w));
}

inline MeaningModel identity_meanings(std::size_t n) {
  return MeaningModel(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)), Prior::uniform(n));
}

inline Matrix identity(std::size_t n) {
  return Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

}  // namespace convexeff::testing

#include <filesystem>
#include <string>
#include <unistd.h>

namespace convexeff::testing {

// A fresh file path under the system temp directory.
inline std::string make_temp_path(const std::string& name) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("convexeff-unit-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace convexeff::testing
