#pragma once

// Perfectly convex (Voronoi) category systems and searches for inefficient
// ones: greedy exemplar swapping and deterministic agglomerative merging.

#include "convexeff/core.hpp"
#include "convexeff/ib.hpp"
#include "convexeff/records.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace convexeff::gen {

enum class Direction { minimize, maximize };

Direction parse_direction(const std::string& s);
std::string to_string(Direction d);

// Nearest centroid per referent (squared Euclidean distance, ties to the
// lowest centroid index). Unrealized centroids keep their index.
std::vector<int> nearest_centroids(const Matrix& centroids, const Universe& universe);

// Voronoi partition of the universe around `exemplars` (one per row); words
// are exemplar indices, unused ones pruned.
HardPartition voronoi_partition(const Matrix& exemplars, const Universe& universe);

// Number of centroids nearest to at least one referent.
std::size_t count_categories(const Matrix& centroids, const Universe& universe);

// Accuracy I(W;U) in bits of hard partitions under one meaning model,
// decomposed per category so that local changes can be rescored cheaply.
class HardAccuracy {
 public:
  explicit HardAccuracy(const MeaningModel& meanings);

  // `assign` holds a category index per referent, categories 0..k-1
  // (empty categories allowed).
  double operator()(const std::vector<int>& assign, std::size_t k) const;

  std::size_t size() const { return static_cast<std::size_t>(weighted_.rows()); }
  // p_t m_t, the contribution of referent t to p(w, u).
  auto row(std::size_t t) const { return weighted_.row(static_cast<Eigen::Index>(t)); }
  // sum_u S log S - q log q for a category's p(w, u) row S (nats).
  static double category_term(const Eigen::Ref<const Eigen::RowVectorXd>& s);
  double referent_entropy() const { return entropy_u_; }  // H(U), nats

 private:
  Matrix weighted_;
  double entropy_u_ = 0.0;
};

struct TraceRecord {
  Matrix exemplars;                      // one centroid per row
  std::vector<std::size_t> exemplar_chips;  // greedy search only
  std::size_t k_realized = 0;
  std::size_t step = 0;
  bool accepted = true;  // false for evaluated-but-rejected swap candidates
  IBScores scores;
};

struct GeneratorTrace {
  std::string algorithm;  // "greedy" or "agglomerative"
  std::uint64_t seed = 0;
  std::size_t k_target = 0;
  Direction direction = Direction::minimize;
  bool converged = false;
  std::vector<TraceRecord> records;
  std::vector<std::string> warnings;
};

// Starts from a seeded random k-subset of referents; sweeps the exemplars in
// shuffled order, applying for each the best strictly improving swap with a
// non-exemplar (lower accuracy for minimize, higher for maximize). Records
// the initial system and every applied swap; with `record_candidates`, also
// every evaluated swap. Stops after a sweep without swaps (converged) or
// after `max_iters` sweeps.
GeneratorTrace greedy_swap_search(const Universe& universe, const MeaningModel& meanings, std::size_t k,
                                  int max_iters, std::uint64_t seed, Direction direction = Direction::minimize,
                                  bool record_candidates = false);

// Starts from every referent as a centroid and repeatedly applies the merge
// with the lowest accuracy among those realizing exactly one category fewer,
// down to `k_min` categories. Ties go to the lowest (i, j) pair; the merged
// centroid takes index i.
GeneratorTrace agglomerative_merge(const Universe& universe, const MeaningModel& meanings, std::size_t k_min = 3);

// Scores every recorded system with realized k in [k_min, k_max].
std::vector<EvalRecord> pool_sample(const std::vector<GeneratorTrace>& traces, std::size_t k_min, std::size_t k_max,
                                    const Universe& universe, const MeaningModel& meanings, const Frontier& frontier,
                                    bool with_convexity = true);

}  // namespace convexeff::gen
