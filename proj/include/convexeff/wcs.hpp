#pragma once

// World Color Survey ingestion: the 330-chip CIELAB universe, per-language
// naming counts, modal and probabilistic systems, hue rotations, and the
// Gaussian perceptual meaning model.

#include "convexeff/core.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace convexeff::wcs {

inline constexpr std::size_t kChipCount = 330;
inline constexpr int kHueColumns = 40;
inline constexpr double kDefaultSigma2 = 64.0;

struct LanguageNaming {
  int language = 0;
  std::vector<std::string> terms;  // term abbreviations, sorted; column order of `counts`
  Matrix counts;                   // 330 x T response counts
};

struct Dataset {
  Universe universe;
  std::vector<LanguageNaming> languages;
  std::vector<std::string> warnings;  // dropped responses and similar
};

struct DataFiles {
  std::string chips = "chip.txt";
  std::string lab = "cnum-vhcm-lab-new.txt";
  std::string terms = "term.txt";

  // The three standard file names inside `dir`.
  static DataFiles in(const std::string& dir);
};

// Throws InputError naming the file and line on any malformed content.
Dataset load_wcs(const DataFiles& files);
Dataset load_wcs(std::istream& chips, std::istream& lab, std::istream& terms);

// Chip -> term with the most responses; ties go to the lowest term index.
HardPartition modal_system(const LanguageNaming& lang);

// q(w|chip) = count(chip, w) / responses(chip).
NamingSystem probabilistic_system(const LanguageNaming& lang);

bool is_achromatic(const Universe& universe, std::size_t referent);

// Shifts chromatic columns by r along the hue dimension; achromatic chips
// (column 0) stay put. r must lie in 1..39.
NamingSystem rotate_system(const Universe& universe, const NamingSystem& system, int r);
HardPartition rotate_system(const Universe& universe, const HardPartition& partition, int r);

// Rotation as a referent permutation: result[source] = destination.
std::vector<std::size_t> rotation_permutation(const Universe& universe, int r);

// m_t(u) proportional to exp(-|x_u - x_t|^2 / (2 sigma2)).
MeaningModel gaussian_meanings(const Universe& universe, double sigma2, Prior prior);
MeaningModel gaussian_meanings(const Universe& universe, double sigma2);

// A prior over the 330 chips from a text file: either one weight per line in
// chip order, or "chip,weight" / "chip weight" pairs. Weights are normalized.
Prior load_prior(const std::string& path, std::size_t n);

}  // namespace convexeff::wcs
