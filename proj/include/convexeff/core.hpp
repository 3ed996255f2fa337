#pragma once

// Shared data model: universes of referents, need priors, speaker meaning
// distributions, soft naming systems and hard partitions.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace convexeff {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Absolute tolerance on probability-vector sums.
inline constexpr double kProbabilityTolerance = 1e-12;

// Position on the WCS naming grid: row 0..9 for A..J, column 0..40.
struct GridPos {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridPos&, const GridPos&) = default;
};

// A finite set of referents 0..n-1 with perceptual coordinates (one row per
// referent) and, optionally, a grid position per referent.
class Universe {
 public:
  explicit Universe(Matrix coords, std::vector<std::optional<GridPos>> grid = {});

  std::size_t size() const { return static_cast<std::size_t>(coords_.rows()); }
  int dim() const { return static_cast<int>(coords_.cols()); }
  const Matrix& coords() const { return coords_; }
  Eigen::VectorXd point(std::size_t i) const { return coords_.row(static_cast<Eigen::Index>(i)).transpose(); }

  bool has_grid() const { return !grid_.empty(); }
  const std::optional<GridPos>& grid(std::size_t i) const { return grid_.at(i); }
  // Referent at a grid position, if any.
  std::optional<std::size_t> at(GridPos pos) const;

  // max(1, largest absolute coordinate); the unit for geometric tolerances.
  double coordinate_scale() const { return scale_; }

 private:
  Matrix coords_;
  std::vector<std::optional<GridPos>> grid_;
  std::vector<std::ptrdiff_t> grid_index_;  // row * 41 + col -> referent, -1 if empty
  double scale_ = 1.0;
};

class Prior {
 public:
  // Validates nonnegativity and a unit sum within kProbabilityTolerance.
  explicit Prior(Vector p);

  static Prior uniform(std::size_t n);
  // Normalizes nonnegative weights with a positive total.
  static Prior from_weights(const Vector& w);

  const Vector& p() const { return p_; }
  std::size_t size() const { return static_cast<std::size_t>(p_.size()); }

 private:
  Vector p_;
};

// Row t is the speaker's belief m_t over referents when the target is t.
class MeaningModel {
 public:
  MeaningModel(Matrix m, Prior prior);

  const Matrix& m() const { return m_; }
  const Prior& prior() const { return prior_; }
  std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  Matrix m_;
  Prior prior_;
};

// Soft encoder q(w|m_t): one row per referent, one column per word.
class NamingSystem {
 public:
  explicit NamingSystem(Matrix q, std::vector<std::string> words = {});

  const Matrix& q() const { return q_; }
  const std::vector<std::string>& words() const { return words_; }
  std::size_t referents() const { return static_cast<std::size_t>(q_.rows()); }
  std::size_t word_count() const { return static_cast<std::size_t>(q_.cols()); }

 private:
  Matrix q_;
  std::vector<std::string> words_;
};

// Hard k-category system: every referent carries one word index in 0..k-1,
// and every listed word has a nonempty extension.
class HardPartition {
 public:
  // Words that label no referent are pruned; surviving words keep their
  // relative order. An empty `words` list labels word i as "i".
  explicit HardPartition(const std::vector<int>& assign, std::vector<std::string> words = {});

  const std::vector<int>& assign() const { return assign_; }
  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return assign_.size(); }
  std::size_t word_count() const { return words_.size(); }

  // Index of a word label; throws InvalidArgument when absent.
  int word_index(const std::string& label) const;

  // Deterministic encoder with q(w|m_t) = 1 for the assigned word.
  NamingSystem to_system() const;

 private:
  std::vector<int> assign_;
  std::vector<std::string> words_;
};

// Maps each referent to the most probable word of its row; ties go to the
// lowest word index.
HardPartition mode_partition(const NamingSystem& system);

// Referents labeled with `word`, in increasing order.
std::vector<std::size_t> category_extension(const HardPartition& partition, int word);
std::vector<std::size_t> category_extension(const HardPartition& partition, const std::string& word);

// Number of distinct words surviving in the mode partition.
std::size_t count_major_categories(const NamingSystem& system);

}  // namespace convexeff
