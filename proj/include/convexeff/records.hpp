#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace convexeff {

// Scores of one category system, shared by the generators, the evaluation
// command and the statistics layer.
struct EvalRecord {
  std::string source;      // language id, or generator algorithm
  int rotation = 0;        // 0 = attested; 1..39 = hue rotation
  std::uint64_t seed = 0;  // generator seed, 0 otherwise
  std::size_t k_target = 0;
  std::size_t k = 0;       // realized / major categories
  std::size_t step = 0;
  double complexity = 0.0;
  double accuracy = 0.0;
  double cost = 0.0;
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double convexity = std::numeric_limits<double>::quiet_NaN();
  // Position of the originating system in its generator trace, if any.
  std::size_t trace = 0;
  std::size_t record = 0;
};

// Generator trace CSV: algorithm,seed,k_target,k_realized,step,
// complexity_bits,accuracy_bits,cost_bits,epsilon_bits,convexity
void write_trace_csv(std::ostream& out, const std::vector<EvalRecord>& records);

// Per-system evaluation CSV: language,rotation,k,complexity_bits,
// accuracy_bits,cost_bits,epsilon_bits,beta_fit,convexity
void write_evaluation_csv(std::ostream& out, const std::vector<EvalRecord>& records);
std::vector<EvalRecord> read_evaluation_csv(std::istream& in);

}  // namespace convexeff
