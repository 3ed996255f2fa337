#pragma once

// Orchestration shared by the command-line tool and the acceptance suite:
// run configuration, data and meaning-model loading, frontier caching, and
// the per-command pipelines.

#include "convexeff/circle.hpp"
#include "convexeff/core.hpp"
#include "convexeff/generators.hpp"
#include "convexeff/ib.hpp"
#include "convexeff/records.hpp"
#include "convexeff/stats.hpp"
#include "convexeff/wcs.hpp"

#include "json.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace convexeff::pipeline {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string data_dir = "data/wcs";
  double sigma2 = wcs::kDefaultSigma2;
  std::string prior = "uniform";  // or a path
  double beta_min = 1.0;
  double beta_max = 1024.0;
  int beta_points = 1000;
  std::uint64_t seed = 1;  // root seed
  int seeds = 20;          // generator seeds per k
  int k_min = 3;
  int k_max = 17;
  std::string direction = "minimize";
  int max_iters = 100;     // greedy sweeps
  bool record_candidates = false;
  bool rotations = false;
  bool allow_unconverged = false;
  int threads = 1;
  std::string out = "out";

  // circle
  std::size_t circle_bins = circle::kDefaultBins;
  double circle_beta_min = 5.0;
  double circle_beta_max = 15.0;
  int circle_beta_points = 41;
  double circle_scale = 1.0;
  std::size_t circle_init_words = 0;
  int theorem2_partitions = 20;

  // classify
  int folds = 5;

  void validate() const;  // throws InvalidArgument
  json to_json() const;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;  // command ran; verdict negative
inline constexpr int kExitInput = 2;
inline constexpr int kExitConvergence = 3;

std::vector<double> beta_grid(const RunConfig& cfg);

struct Problem {
  wcs::Dataset data;
  MeaningModel meanings;
};

// Loads the WCS files from cfg.data_dir and builds the Gaussian meanings
// with the configured prior.
Problem load_problem(const RunConfig& cfg);
MeaningModel build_meanings(const Universe& universe, const RunConfig& cfg);

// Identifies everything a frontier depends on.
std::string frontier_fingerprint(const RunConfig& cfg, const MeaningModel& meanings);

std::string frontier_csv_path(const RunConfig& cfg);
std::string frontier_sidecar_path(const RunConfig& cfg);

struct FrontierRun {
  Frontier frontier;
  double seconds = 0.0;
  FrontierCheck check;
};

// `progress` is forwarded to the annealer (called once per beta).
FrontierRun run_frontier(const MeaningModel& meanings, const RunConfig& cfg,
                         std::function<void(const FrontierPoint&, std::size_t)> progress = {});

// Loads the frontier written by the frontier command and verifies that the
// sidecar's version and fingerprint match the current configuration.
// Throws InputError (with a recompute instruction) when stale.
Frontier load_frontier(const RunConfig& cfg, const MeaningModel& meanings, bool need_encoders);

// One record per language (rotation 0), plus rotations 1..39 on request.
// Efficiency uses the probabilistic system, convexity the modal partition.
std::vector<EvalRecord> evaluate_languages(const Problem& problem, const Frontier& frontier, bool rotations,
                                           int threads = 1);

struct GenerateRun {
  std::vector<gen::GeneratorTrace> traces;
  std::vector<EvalRecord> pool;
  double seconds = 0.0;
};

// Greedy searches for every (k, seed) plus one agglomerative trace, pooled
// over [k_min, k_max].
GenerateRun run_generate(const Problem& problem, const Frontier& frontier, const RunConfig& cfg);
std::uint64_t task_seed(std::uint64_t root, std::uint64_t k, std::uint64_t index);

json exemplar_sidecar(const GenerateRun& run);

struct CircleRun {
  circle::NonconvexResult theorem1;
  Universe universe;
  std::vector<circle::CertaintyWorld> theorem2;
  std::vector<HardPartition> theorem2_inputs;
};

// Random convex k-partition of n bins on the segment: k contiguous runs with
// random cut points.
HardPartition random_convex_partition(std::size_t n, std::size_t k, std::uint64_t seed);

CircleRun run_circle(const RunConfig& cfg);

struct ClassifyRun {
  std::vector<stats::PairExample> pairs;
  stats::AdvantageRates rates;
  std::vector<stats::CurvePoint> curves;
  stats::CvResult cv_epsilon;
  stats::CvResult cv_convexity;
  stats::CvResult cv_both;
  stats::NestedComparison nested;
};

ClassifyRun run_classify(const std::vector<EvalRecord>& records, const RunConfig& cfg);
json table1_json(const ClassifyRun& run);

// Runs fn(i) for i in [0, n) on up to `threads` threads. Results must be
// written to per-index slots so the outcome is independent of scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

json manifest(const std::string& command, const RunConfig& cfg);
void write_json(const std::string& path, const json& j);
void ensure_dir(const std::string& dir);

}  // namespace convexeff::pipeline
