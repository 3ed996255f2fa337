#include "convexeff/wcs.hpp"

#include "convexeff/error.hpp"
#include "convexeff/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace convexeff::wcs {

namespace {

[[noreturn]] void fail(const std::string& file, std::size_t line, const std::string& msg) {
  throw InputError(file + ":" + std::to_string(line) + ": " + msg);
}

struct ChipRecord {
  GridPos pos;
  bool seen = false;
};

std::vector<ChipRecord> parse_chips(std::istream& in, const std::string& label) {
  std::vector<ChipRecord> chips(kChipCount);
  std::string line;
  std::size_t lineno = 0;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = io::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto f = io::split(body, "\t ", true);
    if (f.size() < 3) fail(label, lineno, "expected chip number, row letter and column");
    long long chip = 0;
    long long col = 0;
    try {
      chip = io::parse_int(f[0]);
      col = io::parse_int(f[2]);
    } catch (const InputError& e) {
      fail(label, lineno, e.what());
    }
    if (f[1].size() != 1 || f[1][0] < 'A' || f[1][0] > 'J') fail(label, lineno, "row letter must be A-J");
    if (chip < 1 || chip > static_cast<long long>(kChipCount)) {
      fail(label, lineno, "chip number " + std::to_string(chip) + " outside 1..330");
    }
    if (col < 0 || col > kHueColumns) fail(label, lineno, "grid column outside 0..40");
    auto& rec = chips[static_cast<std::size_t>(chip - 1)];
    if (rec.seen) fail(label, lineno, "duplicate chip " + std::to_string(chip));
    rec.pos = GridPos{f[1][0] - 'A', static_cast<int>(col)};
    rec.seen = true;
    ++count;
  }
  if (count != kChipCount) {
    throw InputError(label + ": expected 330 chips, found " + std::to_string(count));
  }
  return chips;
}

Matrix parse_lab(std::istream& in, const std::string& label) {
  Matrix coords(static_cast<Eigen::Index>(kChipCount), 3);
  std::vector<bool> seen(kChipCount, false);
  std::string line;
  std::size_t lineno = 0;
  std::size_t chip_col = 0;
  std::size_t l_col = 0;
  std::size_t a_col = 0;
  std::size_t b_col = 0;
  bool have_header = false;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = io::trim(line);
    if (body.empty()) continue;
    const auto f = io::split(body, "\t ", true);
    if (!have_header) {
      have_header = true;
      auto find = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < f.size(); ++i)
          if (f[i] == name) return i;
        return std::nullopt;
      };
      const auto l = find("L*");
      const auto a = find("a*");
      const auto b = find("b*");
      if (l && a && b) {
        l_col = *l;
        a_col = *a;
        b_col = *b;
        continue;
      }
      if (body.front() == '#' || !std::isdigit(static_cast<unsigned char>(body.front()))) {
        fail(label, lineno, "header lacks L*, a*, b* columns");
      }
      // Headerless: chip number first, L* a* b* last.
      if (f.size() < 4) fail(label, lineno, "expected chip number and L*, a*, b*");
      l_col = f.size() - 3;
      a_col = f.size() - 2;
      b_col = f.size() - 1;
    }
    if (f.size() <= std::max({chip_col, l_col, a_col, b_col})) fail(label, lineno, "row has too few columns");
    long long chip = 0;
    double L = 0.0;
    double A = 0.0;
    double B = 0.0;
    try {
      chip = io::parse_int(f[chip_col]);
      L = io::parse_double(f[l_col]);
      A = io::parse_double(f[a_col]);
      B = io::parse_double(f[b_col]);
    } catch (const InputError& e) {
      fail(label, lineno, e.what());
    }
    if (chip < 1 || chip > static_cast<long long>(kChipCount)) fail(label, lineno, "chip number outside 1..330");
    const auto idx = static_cast<std::size_t>(chip - 1);
    if (seen[idx]) fail(label, lineno, "duplicate chip " + std::to_string(chip));
    seen[idx] = true;
    coords.row(static_cast<Eigen::Index>(idx)) << L, A, B;
    ++count;
  }
  if (count != kChipCount) {
    throw InputError(label + ": expected 330 chip coordinates, found " + std::to_string(count));
  }
  return coords;
}

bool is_missing_term(std::string_view t) { return t.empty() || t == "*" || t == "?" || t == "-"; }

std::vector<LanguageNaming> parse_terms(std::istream& in, const std::string& label, std::vector<std::string>& warnings) {
  // language -> term -> per-chip counts
  std::map<int, std::map<std::string, std::vector<double>>> table;
  std::map<int, std::size_t> dropped;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = io::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto f = io::split(body, "\t ", true);
    if (f.size() < 3) fail(label, lineno, "expected language, speaker, chip and term");
    long long lang = 0;
    long long chip = 0;
    try {
      lang = io::parse_int(f[0]);
      io::parse_int(f[1]);
      chip = io::parse_int(f[2]);
    } catch (const InputError& e) {
      fail(label, lineno, e.what());
    }
    if (chip < 1 || chip > static_cast<long long>(kChipCount)) fail(label, lineno, "chip number outside 1..330");
    const std::string term = f.size() >= 4 ? f[3] : std::string();
    if (is_missing_term(term)) {
      ++dropped[static_cast<int>(lang)];
      table[static_cast<int>(lang)];
      continue;
    }
    auto& counts = table[static_cast<int>(lang)][term];
    if (counts.empty()) counts.assign(kChipCount, 0.0);
    counts[static_cast<std::size_t>(chip - 1)] += 1.0;
  }
  if (table.empty()) throw InputError(label + ": no naming responses");

  std::vector<LanguageNaming> out;
  for (auto& [lang, terms] : table) {
    if (const auto it = dropped.find(lang); it != dropped.end()) {
      warnings.push_back("language " + std::to_string(lang) + ": dropped " + std::to_string(it->second) +
                         " responses with missing term codes");
    }
    LanguageNaming ln;
    ln.language = lang;
    ln.counts = Matrix::Zero(static_cast<Eigen::Index>(kChipCount), static_cast<Eigen::Index>(terms.size()));
    Eigen::Index col = 0;
    for (auto& [term, counts] : terms) {
      ln.terms.push_back(term);
      for (std::size_t c = 0; c < kChipCount; ++c) ln.counts(static_cast<Eigen::Index>(c), col) = counts[c];
      ++col;
    }
    for (Eigen::Index c = 0; c < ln.counts.rows(); ++c) {
      if (ln.counts.cols() == 0 || ln.counts.row(c).sum() <= 0.0) {
        throw InputError(label + ": language " + std::to_string(lang) + " has no naming response for chip " +
                         std::to_string(c + 1));
      }
    }
    out.push_back(std::move(ln));
  }
  return out;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

}  // namespace

DataFiles DataFiles::in(const std::string& dir) {
  const std::string base = dir.empty() || dir.back() == '/' ? dir : dir + "/";
  return DataFiles{base + "chip.txt", base + "cnum-vhcm-lab-new.txt", base + "term.txt"};
}

namespace {

Dataset assemble(std::istream& chips, const std::string& chip_label, std::istream& lab, const std::string& lab_label,
                 std::istream& terms, const std::string& term_label) {
  const auto chip_recs = parse_chips(chips, chip_label);
  Matrix coords = parse_lab(lab, lab_label);
  std::vector<std::optional<GridPos>> grid;
  grid.reserve(kChipCount);
  for (const auto& rec : chip_recs) grid.emplace_back(rec.pos);
  std::vector<std::string> warnings;
  auto languages = parse_terms(terms, term_label, warnings);
  return Dataset{Universe(std::move(coords), std::move(grid)), std::move(languages), std::move(warnings)};
}

}  // namespace

Dataset load_wcs(const DataFiles& files) {
  auto chips = open_or_throw(files.chips);
  auto lab = open_or_throw(files.lab);
  auto terms = open_or_throw(files.terms);
  return assemble(chips, files.chips, lab, files.lab, terms, files.terms);
}

Dataset load_wcs(std::istream& chips, std::istream& lab, std::istream& terms) {
  return assemble(chips, "chip.txt", lab, "cnum-vhcm-lab-new.txt", terms, "term.txt");
}

HardPartition modal_system(const LanguageNaming& lang) {
  std::vector<int> assign(static_cast<std::size_t>(lang.counts.rows()));
  for (Eigen::Index c = 0; c < lang.counts.rows(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index w = 1; w < lang.counts.cols(); ++w)
      if (lang.counts(c, w) > lang.counts(c, best)) best = w;
    assign[static_cast<std::size_t>(c)] = static_cast<int>(best);
  }
  return HardPartition(assign, lang.terms);
}

NamingSystem probabilistic_system(const LanguageNaming& lang) {
  Matrix q = lang.counts;
  for (Eigen::Index c = 0; c < q.rows(); ++c) {
    const double total = q.row(c).sum();
    if (total <= 0.0) throw InvalidArgument("probabilistic_system: chip without responses");
    q.row(c) /= total;
  }
  return NamingSystem(std::move(q), lang.terms);
}

bool is_achromatic(const Universe& universe, std::size_t referent) {
  const auto& g = universe.grid(referent);
  return g && g->col == 0;
}

std::vector<std::size_t> rotation_permutation(const Universe& universe, int r) {
  if (r < 1 || r >= kHueColumns) throw InvalidArgument("rotate_system: r must lie in 1..39, got " + std::to_string(r));
  if (!universe.has_grid()) throw InvalidArgument("rotate_system: universe has no grid positions");
  std::vector<std::size_t> dest(universe.size());
  for (std::size_t i = 0; i < universe.size(); ++i) {
    const auto& g = universe.grid(i);
    if (!g) throw InvalidArgument("rotate_system: referent without a grid position");
    if (g->col == 0) {
      dest[i] = i;
      continue;
    }
    const GridPos target{g->row, 1 + ((g->col - 1 + r) % kHueColumns)};
    const auto j = universe.at(target);
    if (!j) throw InvalidArgument("rotate_system: rotated grid position is not a referent");
    dest[i] = *j;
  }
  return dest;
}

NamingSystem rotate_system(const Universe& universe, const NamingSystem& system, int r) {
  const auto dest = rotation_permutation(universe, r);
  if (dest.size() != system.referents()) throw InvalidArgument("rotate_system: size mismatch");
  Matrix q(system.q().rows(), system.q().cols());
  for (std::size_t i = 0; i < dest.size(); ++i)
    q.row(static_cast<Eigen::Index>(dest[i])) = system.q().row(static_cast<Eigen::Index>(i));
  return NamingSystem(std::move(q), system.words());
}

HardPartition rotate_system(const Universe& universe, const HardPartition& partition, int r) {
  const auto dest = rotation_permutation(universe, r);
  if (dest.size() != partition.size()) throw InvalidArgument("rotate_system: size mismatch");
  std::vector<int> assign(dest.size());
  for (std::size_t i = 0; i < dest.size(); ++i) assign[dest[i]] = partition.assign()[i];
  return HardPartition(assign, partition.words());
}

MeaningModel gaussian_meanings(const Universe& universe, double sigma2, Prior prior) {
  if (!(sigma2 > 0.0)) throw InvalidArgument("gaussian_meanings: sigma2 must be positive");
  const Matrix& x = universe.coords();
  const auto n = x.rows();
  Matrix m(n, n);
  for (Eigen::Index t = 0; t < n; ++t) {
    double total = 0.0;
    for (Eigen::Index u = 0; u < n; ++u) {
      const double d2 = (x.row(u) - x.row(t)).squaredNorm();
      const double v = std::exp(-d2 / (2.0 * sigma2));
      m(t, u) = v;
      total += v;
    }
    m.row(t) /= total;
  }
  return MeaningModel(std::move(m), std::move(prior));
}

MeaningModel gaussian_meanings(const Universe& universe, double sigma2) {
  return gaussian_meanings(universe, sigma2, Prior::uniform(universe.size()));
}

Prior load_prior(const std::string& path, std::size_t n) {
  auto in = open_or_throw(path);
  Vector w = Vector::Constant(static_cast<Eigen::Index>(n), -1.0);
  std::string line;
  std::size_t lineno = 0;
  std::size_t sequential = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = io::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto f = io::split(body, ",\t ", true);
    try {
      if (f.size() == 1) {
        if (sequential >= n) fail(path, lineno, "more than " + std::to_string(n) + " weights");
        w[static_cast<Eigen::Index>(sequential++)] = io::parse_double(f[0]);
      } else if (f.size() == 2) {
        const long long chip = io::parse_int(f[0]);
        if (chip < 1 || chip > static_cast<long long>(n)) fail(path, lineno, "chip number out of range");
        w[static_cast<Eigen::Index>(chip - 1)] = io::parse_double(f[1]);
      } else {
        fail(path, lineno, "expected a weight or a chip,weight pair");
      }
    } catch (const InputError& e) {
      // Skip a textual header line; anything else is malformed.
      if (lineno == 1 && !std::isdigit(static_cast<unsigned char>(body.front()))) continue;
      if (std::string(e.what()).rfind(path, 0) == 0) throw;
      fail(path, lineno, e.what());
    }
  }
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] < 0.0) throw InputError(path + ": no weight for chip " + std::to_string(i + 1));
  }
  try {
    return Prior::from_weights(w);
  } catch (const InvalidArgument& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace convexeff::wcs
