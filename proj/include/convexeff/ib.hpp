#pragma once

// Information Bottleneck quantities for naming systems, the self-consistent
// (Blahut-Arimoto style) solver, reverse deterministic annealing over a
// tradeoff grid, and the deviation-from-optimality score.
//
// All information quantities are reported in bits. Conventions:
//   0 log 0 = 0;  D[m_t || m_hat_w] = +inf when m_hat_w(u) = 0 < m_t(u).

#include "convexeff/core.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace convexeff {

struct IBScores {
  double complexity = 0.0;  // I(M;W)
  double accuracy = 0.0;    // I(W;U)
  double cost = 0.0;        // E[D[M || M_hat]] = I(M;U) - I(W;U)
};

double complexity(const NamingSystem& system, const MeaningModel& meanings);
double accuracy(const NamingSystem& system, const MeaningModel& meanings);
double communicative_cost(const NamingSystem& system, const MeaningModel& meanings);
IBScores score(const NamingSystem& system, const MeaningModel& meanings);

// I(M;U): the accuracy ceiling for the meaning model.
double meaning_information(const MeaningModel& meanings);

// F_beta = complexity - beta * accuracy. beta must be nonnegative.
double ib_objective(const NamingSystem& system, const MeaningModel& meanings, double beta);

struct FixedPointOptions {
  double objective_tolerance = 1e-10;  // stop when |dF| falls below this ...
  // ... and the largest row L1 change of the encoder (the self-consistency
  // gap of the previous iterate) falls below this.
  double encoder_tolerance = 5e-7;
  int max_iterations = 10000;
  // Squared (SQUAREM-style) extrapolation between plain updates, accepted
  // only when it lowers the objective. Fixed points are unchanged.
  bool accelerate = true;
  bool record_objective = false;
};

struct IBSolution {
  double beta = 0.0;
  NamingSystem encoder;
  Vector marginal;  // q(w)
  Matrix decoder;   // row w is m_hat_w over referents
  double objective = 0.0;
  double complexity = 0.0;
  double accuracy = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // F after init and after every update, if recorded
};

// Alternates marginal, decoder and encoder updates from `init` until the
// stopping rule holds or the iteration cap is reached. A capped run is
// returned with converged = false.
IBSolution ba_fixed_point(const MeaningModel& meanings, double beta, const NamingSystem& init,
                          const FixedPointOptions& options = {});

// Largest row-wise L1 gap between the encoder and one more encoder update
// computed from the solution's own marginal and decoder.
double self_consistency_gap(const IBSolution& solution, const MeaningModel& meanings);

struct FrontierPoint {
  double beta = 0.0;
  double complexity = 0.0;
  double accuracy = 0.0;
  double f_star = 0.0;
  bool converged = true;
  int iterations = 0;  // fixed-point iterations spent (not serialized to CSV)
};

struct FrontierCheck {
  bool betas_increasing = true;
  bool accuracy_monotone = true;
  bool complexity_monotone = true;
  bool concave = true;
  double worst_accuracy_drop = 0.0;
  double worst_complexity_drop = 0.0;
  double worst_slope_increase = 0.0;
  bool ok() const { return betas_increasing && accuracy_monotone && complexity_monotone && concave; }
};

class Frontier {
 public:
  Frontier() = default;
  explicit Frontier(std::vector<FrontierPoint> points, std::vector<NamingSystem> encoders = {});

  const std::vector<FrontierPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool has_encoders() const { return !encoders_.empty(); }
  const std::vector<NamingSystem>& encoders() const { return encoders_; }
  std::vector<double> betas() const;
  std::vector<double> unconverged_betas() const;

  // Monotonicity within `monotone_tol`; concavity as nonincreasing chord
  // slopes within `slope_tol`, using chords at least `min_chord` bits wide.
  FrontierCheck check(double monotone_tol = 1e-9, double slope_tol = 1e-6, double min_chord = 1e-3) const;

  // Accuracy of the first point whose complexity is >= c (the last point's
  // accuracy when c exceeds every point). No system at complexity c should
  // be more accurate than this.
  double accuracy_bound(double c) const;

 private:
  std::vector<FrontierPoint> points_;
  std::vector<NamingSystem> encoders_;
};

// n geometrically spaced values from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, int n);

struct AnnealOptions {
  std::uint64_t seed = 1;
  double init_noise = 1e-2;       // uniform noise added to the identity encoder
  double merge_tolerance = 1e-6;  // merge words whose decoders differ by less (L1)
  double prune_mass = 1e-14;      // drop words with marginal below this
  bool keep_encoders = true;
  // 0 starts from the perturbed identity (one word per referent); otherwise
  // from a seeded random soft encoder with this many words.
  std::size_t init_words = 0;
  // Compact (prune and merge words) every this many fixed-point iterations
  // within one beta; 0 compacts only between betas.
  int compact_every = 50;
  FixedPointOptions fixed_point;
  // Called after each beta with the point and the word count it ended with.
  std::function<void(const FrontierPoint&, std::size_t)> progress;
};

// Solves from the largest beta down, seeding each solve with the previous
// solution. `betas` must be strictly increasing and positive.
Frontier compute_frontier(const MeaningModel& meanings, std::span<const double> betas,
                          const AnnealOptions& options = {});

// Near-identity starting encoder: identity plus `noise` * U[0,1) per entry,
// rows renormalized.
NamingSystem perturbed_identity(std::size_t n, double noise, std::uint64_t seed);

// Rows drawn uniformly on [0,1)^k and normalized.
NamingSystem random_encoder(std::size_t n, std::size_t k, std::uint64_t seed);

struct Deviation {
  double epsilon = 0.0;  // bits
  double beta = 0.0;     // minimizing grid value (fitted tradeoff)
};

Deviation epsilon(const NamingSystem& system, const MeaningModel& meanings, const Frontier& frontier);
Deviation epsilon(double complexity, double accuracy, const Frontier& frontier);

// Frontier CSV: beta,complexity_bits,accuracy_bits,F_star with full
// round-trip precision.
void write_frontier_csv(std::ostream& out, const Frontier& frontier);
Frontier read_frontier_csv(std::istream& in);

// Encoder sidecar: versioned binary file storing every point's encoder next
// to a caller-supplied fingerprint of the configuration that produced it.
inline constexpr std::uint32_t kFrontierSidecarVersion = 2;
void write_frontier_sidecar(const std::string& path, const Frontier& frontier, const std::string& fingerprint);
struct SidecarContents {
  std::uint32_t version = 0;
  std::string fingerprint;
  Frontier frontier;
};
SidecarContents read_frontier_sidecar(const std::string& path);

}  // namespace convexeff
