#pragma once

// Synthetic data in the three WCS file formats: a Munsell-like 330-chip grid
// placed in CIELAB, and languages whose speakers name chips by a noisy
// nearest-prototype rule. Structure only; no real survey values.

#include <cstdint>
#include <string>

namespace convexeff::testing {

struct SyntheticWcsOptions {
  int languages = 3;
  int speakers = 5;
  int min_terms = 3;
  int max_terms = 8;
  double temperature = 40.0;   // softmax temperature on squared distance / 100
  double missing_rate = 0.0;   // share of responses written as "*"
  std::uint64_t seed = 11;
  bool lab_header = true;
};

// Writes chip.txt, cnum-vhcm-lab-new.txt and term.txt into `dir` (created if
// needed).
void write_synthetic_wcs(const std::string& dir, const SyntheticWcsOptions& options = {});

// Fresh empty directory under the system temp dir.
std::string make_temp_dir(const std::string& stem);

}  // namespace convexeff::testing
