#pragma once

// The angle domain: n bins on [0, 2pi), treated as the line segment for
// convexity. Used to exhibit an IB-optimal system that is not convex and a
// convex system that carries no information under a suitable need prior.

#include "convexeff/core.hpp"
#include "convexeff/ib.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace convexeff::circle {

inline constexpr std::size_t kDefaultBins = 360;

// Bin i sits at angle 2*pi*i/n (one coordinate per referent). n must be a
// positive multiple of 4 so that 0, pi/2, pi and 3pi/2 are bins.
Universe circle_universe(std::size_t n = kDefaultBins);

// m_t(u) proportional to exp(scale * |cos(u - t)|), uniform prior. Every row
// is the same kernel shifted, so rows t and t + n/2 are bitwise identical.
MeaningModel similarity_meanings(const Universe& universe, double scale = 1.0);

// Speaker certainty: m_t = delta_t.
MeaningModel certainty_meanings(std::size_t n, const Prior& prior);

// Number of maximal runs of consecutive bins carrying `word` (no
// wraparound). A category is convex on the segment iff this is 1.
std::size_t arc_count(const HardPartition& partition, int word);
bool is_segment_convex(const HardPartition& partition);

struct NonconvexSearch {
  double beta_min = 5.0;
  double beta_max = 15.0;
  int beta_points = 41;
  double target_beta = 9.11;  // preferred when several window betas qualify
  AnnealOptions anneal;
};

struct NonconvexResult {
  bool found = false;
  double beta = 0.0;
  std::optional<IBSolution> solution;
  std::vector<std::size_t> arcs;     // per mode-partition word
  std::size_t categories = 0;        // words in the mode partition
  double mirror_gap = 0.0;           // max_w |q(w|m_0) - q(w|m_pi)|, same for pi/2 vs 3pi/2
  std::vector<double> scanned_betas;
  std::vector<std::size_t> scanned_categories;
  std::string report;                // human-readable scan summary
};

// Anneals over the window and returns the qualifying solution (two major
// categories, each spread over at least two arcs) nearest to target_beta.
NonconvexResult find_nonconvex_optimum(const MeaningModel& meanings, const NonconvexSearch& search = {});

struct CertaintyWorld {
  Prior prior;                       // uniform on the support segment
  std::vector<std::size_t> support;  // bins of C_A, consecutive
  int source_word = 0;               // category of P containing C_A
  HardPartition q;                   // k equal segments of C_A, extended convexly
  IBScores p_scores;
  IBScores q_scores;
  double q_closed_form = 0.0;        // bits
};

// Builds the world in which convex P is non-informative: a prior uniform on
// a run of floor(fraction * |C|) bins (rounded down to a multiple of k) at
// the start of P's largest category C, speaker-certainty meanings, and a
// convex Q splitting that run into k equal segments. Throws InvalidArgument
// when P is not convex or the run cannot hold k bins.
CertaintyWorld theorem2_construction(const HardPartition& p, double fraction = 1.0);

// sum_w (|C_Q(w) & C_A| / A) log2(A / |C_Q(w) & C_A|).
double certainty_accuracy_closed_form(const HardPartition& q, const std::vector<std::size_t>& support);

// angle_rad,q_<word>... one row per bin.
void write_encoder_csv(std::ostream& out, const Universe& universe, const NamingSystem& system);

}  // namespace convexeff::circle
