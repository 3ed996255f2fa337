#include "doctest.h"

#include "synthetic_wcs.hpp"

#include "convexeff/error.hpp"
#include "convexeff/wcs.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace convexeff;
namespace fs = std::filesystem;

namespace {

const wcs::Dataset& fixture() {
  static const wcs::Dataset data = [] {
    const std::string dir = convexeff::testing::make_temp_dir("wcs-unit");
    convexeff::testing::write_synthetic_wcs(dir);
    return wcs::load_wcs(wcs::DataFiles::in(dir));
  }();
  return data;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

wcs::LanguageNaming two_term_language(double a, double b) {
  wcs::LanguageNaming lang;
  lang.terms = {"p", "q"};
  lang.counts = Matrix::Ones(static_cast<Eigen::Index>(wcs::kChipCount), 2);
  lang.counts(0, 0) = a;
  lang.counts(0, 1) = b;
  return lang;
}

}  // namespace

TEST_SUITE("wcs") {

TEST_CASE("synthetic files load into a 330-chip grid universe") {
  const auto& d = fixture();
  CHECK(d.universe.size() == wcs::kChipCount);
  CHECK(d.universe.dim() == 3);
  CHECK(d.languages.size() == 3);
  int achromatic = 0;
  for (std::size_t i = 0; i < d.universe.size(); ++i) {
    const auto& g = d.universe.grid(i);
    REQUIRE(g.has_value());
    CHECK(g->row >= 0);
    CHECK(g->row <= 9);
    CHECK(g->col >= 0);
    CHECK(g->col <= 40);
    if (g->col == 0) {
      ++achromatic;
      CHECK(wcs::is_achromatic(d.universe, i));
    }
  }
  CHECK(achromatic == 10);
}

TEST_CASE("term file restricted to one language") {
  const std::string dir = convexeff::testing::make_temp_dir("wcs-one");
  convexeff::testing::write_synthetic_wcs(dir);
  std::istringstream all(slurp(dir + "/term.txt"));
  std::ofstream out(dir + "/term.txt");
  for (std::string line; std::getline(all, line);)
    if (line.rfind("2\t", 0) == 0) out << line << '\n';
  out.close();
  const auto d = wcs::load_wcs(wcs::DataFiles::in(dir));
  REQUIRE(d.languages.size() == 1);
  CHECK(d.languages[0].language == 2);
}

TEST_CASE("a lab file with 329 rows is rejected") {
  const std::string dir = convexeff::testing::make_temp_dir("wcs-329");
  convexeff::testing::write_synthetic_wcs(dir);
  std::string lab = slurp(dir + "/cnum-vhcm-lab-new.txt");
  lab.erase(lab.rfind('\n', lab.size() - 2) + 1);
  std::ofstream(dir + "/cnum-vhcm-lab-new.txt") << lab;
  CHECK_THROWS_AS(wcs::load_wcs(wcs::DataFiles::in(dir)), InputError);
}

TEST_CASE("malformed rows name the file and line") {
  const std::string dir = convexeff::testing::make_temp_dir("wcs-bad");
  convexeff::testing::write_synthetic_wcs(dir);
  std::ofstream(dir + "/term.txt", std::ios::app) << "1\t1\tnotachip\tta\n";
  try {
    wcs::load_wcs(wcs::DataFiles::in(dir));
    FAIL("expected an ingestion error");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("term.txt:") != std::string::npos);
  }
}

TEST_CASE("missing files are reported by path") {
  const std::string dir = convexeff::testing::make_temp_dir("wcs-missing");
  convexeff::testing::write_synthetic_wcs(dir);
  fs::remove(dir + "/cnum-vhcm-lab-new.txt");
  try {
    wcs::load_wcs(wcs::DataFiles::in(dir));
    FAIL("expected an ingestion error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("cnum-vhcm-lab-new.txt") != std::string::npos);
  }
}

TEST_CASE("responses with missing term codes are dropped with a warning") {
  const std::string dir = convexeff::testing::make_temp_dir("wcs-star");
  convexeff::testing::SyntheticWcsOptions opts;
  opts.missing_rate = 0.02;
  convexeff::testing::write_synthetic_wcs(dir, opts);
  const auto d = wcs::load_wcs(wcs::DataFiles::in(dir));
  CHECK(!d.warnings.empty());
  for (const auto& lang : d.languages)
    for (const auto& t : lang.terms) CHECK(t != "*");
}

TEST_CASE("modal system examples and tie rule") {
  CHECK(wcs::modal_system(two_term_language(5, 2)).assign()[0] == 0);
  CHECK(wcs::modal_system(two_term_language(3, 3)).assign()[0] == 0);
  CHECK(wcs::modal_system(two_term_language(1, 4)).assign()[0] == 1);
}

TEST_CASE("probabilistic system normalizes counts") {
  const NamingSystem even = wcs::probabilistic_system(two_term_language(5, 5));
  CHECK(even.q()(0, 0) == doctest::Approx(0.5));
  CHECK(even.q()(0, 1) == doctest::Approx(0.5));
  const NamingSystem sure = wcs::probabilistic_system(two_term_language(10, 0));
  CHECK(sure.q()(0, 0) == 1.0);
  CHECK(sure.q()(0, 1) == 0.0);
  for (const auto& lang : fixture().languages) {
    const NamingSystem s = wcs::probabilistic_system(lang);
    for (Eigen::Index r = 0; r < s.q().rows(); ++r) CHECK(std::abs(s.q().row(r).sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("mode of the probabilistic system equals the modal system") {
  for (const auto& lang : fixture().languages) {
    const HardPartition a = mode_partition(wcs::probabilistic_system(lang));
    const HardPartition b = wcs::modal_system(lang);
    CHECK(a.assign() == b.assign());
    CHECK(a.words() == b.words());
  }
}

TEST_CASE("modal category count matches a count taken straight from the term file") {
  const std::string dir = convexeff::testing::make_temp_dir("wcs-count");
  convexeff::testing::write_synthetic_wcs(dir);
  // chip -> term -> responses for language 1, read without the loader.
  std::map<int, std::map<std::string, int>> counts;
  std::ifstream in(dir + "/term.txt");
  for (std::string line; std::getline(in, line);) {
    std::istringstream ls(line);
    int lang = 0, speaker = 0, chip = 0;
    std::string term;
    ls >> lang >> speaker >> chip >> term;
    if (lang == 1) ++counts[chip][term];
  }
  std::set<std::string> modal;
  for (const auto& [chip, terms] : counts) {
    std::string best;
    int top = -1;
    for (const auto& [t, c] : terms)  // map order = lexicographic, so ties keep the smallest term
      if (c > top) top = c, best = t;
    modal.insert(best);
  }
  const auto& lang = fixture().languages[0];
  REQUIRE(lang.language == 1);
  CHECK(wcs::modal_system(lang).word_count() == modal.size());
  CHECK(count_major_categories(wcs::probabilistic_system(lang)) == modal.size());
}

TEST_CASE("rotations") {
  const auto& d = fixture();
  const auto& u = d.universe;
  const HardPartition modal = wcs::modal_system(d.languages[0]);
  const NamingSystem soft = wcs::probabilistic_system(d.languages[0]);

  CHECK_THROWS_AS(wcs::rotate_system(u, modal, 0), InvalidArgument);
  CHECK_THROWS_AS(wcs::rotate_system(u, modal, 40), InvalidArgument);

  for (int r = 1; r < 40; ++r) {
    const HardPartition rot = wcs::rotate_system(u, modal, r);
    CHECK(rot.word_count() == modal.word_count());
    if (r != 20) {
      const HardPartition back = wcs::rotate_system(u, rot, 40 - r);
      CHECK(back.assign() == modal.assign());
    }
    const NamingSystem srot = wcs::rotate_system(u, soft, r);
    CHECK(count_major_categories(srot) == count_major_categories(soft));
  }
  const HardPartition half = wcs::rotate_system(u, wcs::rotate_system(u, modal, 20), 20);
  CHECK(half.assign() == modal.assign());

  // Additive composition and explicit destination columns.
  const auto p7 = wcs::rotation_permutation(u, 7);
  const auto p5 = wcs::rotation_permutation(u, 5);
  const auto p12 = wcs::rotation_permutation(u, 12);
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(p5[p7[i]] == p12[i]);
    const auto g = *u.grid(i);
    const auto dest = *u.grid(p7[i]);
    CHECK(dest.row == g.row);
    if (g.col == 0) {
      CHECK(dest.col == 0);
    } else {
      CHECK(dest.col == 1 + (g.col - 1 + 7) % 40);
    }
  }

  // The naming row of a chromatic chip moves to its destination chip.
  const NamingSystem s3 = wcs::rotate_system(u, soft, 3);
  const auto p3 = wcs::rotation_permutation(u, 3);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK((s3.q().row(static_cast<Eigen::Index>(p3[i])) - soft.q().row(static_cast<Eigen::Index>(i))).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gaussian meanings") {
  const auto& u = fixture().universe;
  const MeaningModel mm = wcs::gaussian_meanings(u, 64.0);
  const MeaningModel narrow = wcs::gaussian_meanings(u, 1e-3);
  const MeaningModel flat = wcs::gaussian_meanings(u, 1e9);
  for (Eigen::Index t = 0; t < mm.m().rows(); ++t) {
    Eigen::Index arg = 0;
    mm.m().row(t).maxCoeff(&arg);
    CHECK(arg == t);
    CHECK(mm.m().row(t).minCoeff() > 0.0);
    CHECK(std::abs(mm.m().row(t).sum() - 1.0) <= 1e-12);
    narrow.m().row(t).maxCoeff(&arg);
    CHECK(arg == t);
    CHECK((flat.m().row(t).array() - 1.0 / 330.0).abs().maxCoeff() < 1e-6);
  }
  CHECK_THROWS_AS(wcs::gaussian_meanings(u, 0.0), InvalidArgument);
}

TEST_CASE("prior files: one weight per line or chip,weight pairs") {
  const std::string dir = convexeff::testing::make_temp_dir("wcs-prior");
  {
    std::ofstream out(dir + "/plain.txt");
    for (int i = 1; i <= 330; ++i) out << i << '\n';
    std::ofstream pairs(dir + "/pairs.csv");
    for (int i = 330; i >= 1; --i) pairs << i << ',' << i << '\n';
    std::ofstream bad(dir + "/bad.txt");
    bad << "1,2\n";
  }
  const Prior a = wcs::load_prior(dir + "/plain.txt", 330);
  const Prior b = wcs::load_prior(dir + "/pairs.csv", 330);
  CHECK((a.p() - b.p()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(a.p()[329] == doctest::Approx(330.0 / (330.0 * 331.0 / 2.0)));
  CHECK_THROWS_AS(wcs::load_prior(dir + "/bad.txt", 330), InputError);
  CHECK_THROWS_AS(wcs::load_prior(dir + "/absent.txt", 330), InputError);
}

}  // TEST_SUITE
