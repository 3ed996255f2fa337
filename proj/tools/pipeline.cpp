#include "pipeline.hpp"

#include "convexeff/convexity.hpp"
#include "convexeff/error.hpp"
#include "convexeff/io.hpp"
#include "convexeff/rng.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace convexeff::pipeline {

namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// FNV-1a over raw bytes.
struct Fnv {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  }
};

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

json fit_json(const std::string& name, const stats::FitResult& fit) {
  json coef = json::object();
  for (std::size_t i = 0; i < fit.features.size(); ++i) coef[stats::to_string(fit.features[i])] = fit.coefficients[i];
  return json{{"model", name},
              {"coefficients", coef},
              {"intercept", fit.intercept},
              {"log_likelihood", fit.log_likelihood},
              {"n", fit.n},
              {"iterations", fit.iterations},
              {"converged", fit.converged},
              {"separated", fit.separated}};
}

json lrt_json(const std::string& dropped, const stats::LrtResult& r) {
  return json{{"dropped", dropped}, {"chi2", r.chi2}, {"df", r.df}, {"p", r.p}};
}

json cv_json(const stats::CvResult& r) {
  json folds = json::array();
  for (double a : r.fold_auc) folds.push_back(std::isfinite(a) ? json(a) : json(nullptr));
  return json{{"mean_auc", r.mean_auc}, {"fold_auc", folds}, {"warnings", r.warnings}};
}

}  // namespace

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
  };
  require(sigma2 > 0.0 && std::isfinite(sigma2), "--sigma2 must be positive");
  require(beta_min > 0.0, "--beta-min must be positive");
  require(beta_max >= beta_min, "--beta-max must be at least --beta-min");
  require(beta_points >= 1, "--beta-points must be positive");
  require(beta_points == 1 || beta_max > beta_min, "--beta-max must exceed --beta-min for more than one point");
  require(seeds >= 1, "--seeds must be positive");
  require(k_min >= 1 && k_max >= k_min, "need 1 <= --k-min <= --k-max");
  require(max_iters >= 1, "--max-iters must be positive");
  require(threads >= 1, "--threads must be positive");
  require(folds >= 2, "--folds must be at least 2");
  require(circle_bins >= 4 && circle_bins % 4 == 0, "--circle-bins must be a positive multiple of 4");
  require(circle_beta_min > 0.0 && circle_beta_max > circle_beta_min && circle_beta_points >= 2,
          "invalid circle beta window");
  require(circle_scale > 0.0, "--similarity-scale must be positive");
  require(theorem2_partitions >= 1, "--theorem2-partitions must be positive");
  gen::parse_direction(direction);
  require(!out.empty(), "--out must not be empty");
}

json RunConfig::to_json() const {
  return json{{"data_dir", data_dir},
              {"sigma2", sigma2},
              {"prior", prior},
              {"beta_min", beta_min},
              {"beta_max", beta_max},
              {"beta_points", beta_points},
              {"seed", seed},
              {"seeds", seeds},
              {"k_min", k_min},
              {"k_max", k_max},
              {"direction", direction},
              {"max_iters", max_iters},
              {"record_candidates", record_candidates},
              {"rotations", rotations},
              {"allow_unconverged", allow_unconverged},
              {"threads", threads},
              {"out", out},
              {"circle_bins", circle_bins},
              {"circle_beta_min", circle_beta_min},
              {"circle_beta_max", circle_beta_max},
              {"circle_beta_points", circle_beta_points},
              {"circle_scale", circle_scale},
              {"circle_init_words", circle_init_words},
              {"theorem2_partitions", theorem2_partitions},
              {"folds", folds}};
}

std::vector<double> beta_grid(const RunConfig& cfg) { return geometric_grid(cfg.beta_min, cfg.beta_max, cfg.beta_points); }

MeaningModel build_meanings(const Universe& universe, const RunConfig& cfg) {
  if (cfg.prior == "uniform") return wcs::gaussian_meanings(universe, cfg.sigma2);
  return wcs::gaussian_meanings(universe, cfg.sigma2, wcs::load_prior(cfg.prior, universe.size()));
}

Problem load_problem(const RunConfig& cfg) {
  if (!fs::is_directory(cfg.data_dir)) throw InputError("data directory not found: " + cfg.data_dir);
  wcs::Dataset data = wcs::load_wcs(wcs::DataFiles::in(cfg.data_dir));
  MeaningModel mm = build_meanings(data.universe, cfg);
  return Problem{std::move(data), std::move(mm)};
}

std::string frontier_fingerprint(const RunConfig& cfg, const MeaningModel& meanings) {
  Fnv f;
  f.bytes(meanings.m().data(), static_cast<std::size_t>(meanings.m().size()) * sizeof(double));
  f.bytes(meanings.prior().p().data(), static_cast<std::size_t>(meanings.prior().p().size()) * sizeof(double));
  const AnnealOptions defaults;
  std::ostringstream os;
  os << "n=" << meanings.size() << ";beta=" << io::fmt(cfg.beta_min) << ':' << io::fmt(cfg.beta_max) << ':'
     << cfg.beta_points << ";seed=" << cfg.seed << ";noise=" << io::fmt(defaults.init_noise)
     << ";merge=" << io::fmt(defaults.merge_tolerance) << ";meanings=" << hex(f.h);
  return os.str();
}

std::string frontier_csv_path(const RunConfig& cfg) { return (fs::path(cfg.out) / "frontier.csv").string(); }
std::string frontier_sidecar_path(const RunConfig& cfg) {
  return (fs::path(cfg.out) / "frontier_encoders.bin").string();
}

FrontierRun run_frontier(const MeaningModel& meanings, const RunConfig& cfg,
                         std::function<void(const FrontierPoint&, std::size_t)> progress) {
  AnnealOptions opts;
  opts.progress = std::move(progress);
  opts.seed = cfg.seed;
  opts.keep_encoders = true;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> betas = beta_grid(cfg);
  FrontierRun run;
  run.frontier = compute_frontier(meanings, betas, opts);
  run.seconds = seconds_since(t0);
  run.check = run.frontier.check();
  return run;
}

Frontier load_frontier(const RunConfig& cfg, const MeaningModel& meanings, bool need_encoders) {
  const std::string csv = frontier_csv_path(cfg);
  const std::string sidecar = frontier_sidecar_path(cfg);
  const std::string recompute = "; recompute it with `convexeff frontier` using the same configuration";
  if (!fs::exists(csv)) throw InputError("frontier not found at " + csv + recompute);
  if (!fs::exists(sidecar)) throw InputError("frontier sidecar not found at " + sidecar + recompute);

  SidecarContents side;
  try {
    side = read_frontier_sidecar(sidecar);
  } catch (const InputError& e) {
    throw InputError(std::string("stale frontier: ") + e.what() + recompute);
  }
  const std::string expected = frontier_fingerprint(cfg, meanings);
  if (side.fingerprint != expected) {
    throw InputError("stale frontier at " + csv + ": it was computed for [" + side.fingerprint +
                     "] but the current configuration is [" + expected + "]" + recompute);
  }
  std::ifstream in(csv);
  Frontier table = read_frontier_csv(in);
  if (table.betas() != side.frontier.betas())
    throw InputError("frontier CSV " + csv + " does not match its sidecar" + recompute);
  if (need_encoders) return std::move(side.frontier);
  return table;
}

std::vector<EvalRecord> evaluate_languages(const Problem& problem, const Frontier& frontier, bool rotations,
                                           int threads) {
  const auto& langs = problem.data.languages;
  const Universe& universe = problem.data.universe;
  const int variants = rotations ? wcs::kHueColumns : 1;
  std::vector<EvalRecord> out(langs.size() * static_cast<std::size_t>(variants));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const auto& lang = langs[i / static_cast<std::size_t>(variants)];
    const int r = static_cast<int>(i % static_cast<std::size_t>(variants));
    NamingSystem soft = wcs::probabilistic_system(lang);
    HardPartition modal = wcs::modal_system(lang);
    if (r > 0) {
      soft = wcs::rotate_system(universe, soft, r);
      modal = wcs::rotate_system(universe, modal, r);
    }
    const IBScores s = score(soft, problem.meanings);
    const Deviation d = epsilon(s.complexity, s.accuracy, frontier);
    EvalRecord rec;
    rec.source = std::to_string(lang.language);
    rec.rotation = r;
    rec.k = modal.word_count();
    rec.complexity = s.complexity;
    rec.accuracy = s.accuracy;
    rec.cost = s.cost;
    rec.epsilon = d.epsilon;
    rec.beta = d.beta;
    rec.convexity = system_consistency(modal, universe);
    out[i] = std::move(rec);
  });
  return out;
}

std::uint64_t task_seed(std::uint64_t root, std::uint64_t k, std::uint64_t index) {
  return derive_seed(root, {k, index});
}

GenerateRun run_generate(const Problem& problem, const Frontier& frontier, const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const Universe& universe = problem.data.universe;
  const gen::Direction dir = gen::parse_direction(cfg.direction);
  const auto k_span = static_cast<std::size_t>(cfg.k_max - cfg.k_min + 1);
  const auto per_k = static_cast<std::size_t>(cfg.seeds);
  const std::size_t greedy = k_span * per_k;

  GenerateRun run;
  run.traces.resize(greedy + 1);
  // The agglomerative trace is by far the longest task, so it goes first.
  parallel_for(greedy + 1, cfg.threads, [&](std::size_t i) {
    if (i == 0) {
      run.traces[greedy] = gen::agglomerative_merge(universe, problem.meanings, static_cast<std::size_t>(cfg.k_min));
      return;
    }
    const std::size_t task = i - 1;
    const auto k = static_cast<std::size_t>(cfg.k_min) + task / per_k;
    const std::uint64_t s = task % per_k + 1;
    run.traces[task] = gen::greedy_swap_search(universe, problem.meanings, k, cfg.max_iters, task_seed(cfg.seed, k, s),
                                               dir, cfg.record_candidates);
  });
  run.pool = gen::pool_sample(run.traces, static_cast<std::size_t>(cfg.k_min), static_cast<std::size_t>(cfg.k_max),
                              universe, problem.meanings, frontier);
  run.seconds = seconds_since(t0);
  return run;
}

json exemplar_sidecar(const GenerateRun& run) {
  json traces = json::array();
  for (std::size_t t = 0; t < run.traces.size(); ++t) {
    const auto& tr = run.traces[t];
    json records = json::array();
    for (const auto& rec : tr.records) {
      json ex = json::array();
      for (Eigen::Index r = 0; r < rec.exemplars.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < rec.exemplars.cols(); ++c) row.push_back(rec.exemplars(r, c));
        ex.push_back(row);
      }
      json item{{"step", rec.step}, {"k_realized", rec.k_realized}, {"accepted", rec.accepted}};
      if (!rec.exemplar_chips.empty()) item["exemplar_chips"] = rec.exemplar_chips;
      item["exemplars"] = ex;
      records.push_back(item);
    }
    traces.push_back(json{{"trace", t},
                          {"algorithm", tr.algorithm},
                          {"seed", tr.seed},
                          {"k_target", tr.k_target},
                          {"direction", gen::to_string(tr.direction)},
                          {"converged", tr.converged},
                          {"warnings", tr.warnings},
                          {"records", records}});
  }
  return json{{"traces", traces}};
}

HardPartition random_convex_partition(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k > n) throw InvalidArgument("random_convex_partition: need 1 <= k <= n");
  Rng rng(seed);
  // k - 1 distinct cut points from 1..n-1 by a partial Fisher-Yates draw.
  std::vector<std::size_t> cuts(n - 1);
  for (std::size_t i = 0; i < cuts.size(); ++i) cuts[i] = i + 1;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const std::size_t j = i + rng.below(cuts.size() - i);
    std::swap(cuts[i], cuts[j]);
  }
  cuts.resize(k - 1);
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> assign(n);
  std::size_t w = 0;
  for (std::size_t u = 0; u < n; ++u) {
    while (w < cuts.size() && u >= cuts[w]) ++w;
    assign[u] = static_cast<int>(w);
  }
  return HardPartition(assign);
}

CircleRun run_circle(const RunConfig& cfg) {
  CircleRun run{circle::NonconvexResult{}, circle::circle_universe(cfg.circle_bins), {}, {}};
  const MeaningModel mm = circle::similarity_meanings(run.universe, cfg.circle_scale);
  circle::NonconvexSearch search;
  search.beta_min = cfg.circle_beta_min;
  search.beta_max = cfg.circle_beta_max;
  search.beta_points = cfg.circle_beta_points;
  search.anneal.seed = cfg.seed;
  search.anneal.init_words = cfg.circle_init_words;
  run.theorem1 = circle::find_nonconvex_optimum(mm, search);

  for (std::size_t k : {2U, 4U, 8U}) {
    for (int i = 0; i < cfg.theorem2_partitions; ++i) {
      // Largest category must hold at least k bins; with n >= 4k this always
      // holds, but redraw on the rare failure to keep the count fixed.
      for (std::uint64_t attempt = 0;; ++attempt) {
        HardPartition p = random_convex_partition(cfg.circle_bins, k,
                                                  derive_seed(cfg.seed, {0x7432ULL, k, static_cast<std::uint64_t>(i), attempt}));
        try {
          run.theorem2.push_back(circle::theorem2_construction(p));
          run.theorem2_inputs.push_back(std::move(p));
          break;
        } catch (const InvalidArgument&) {
          if (attempt > 100) throw;
        }
      }
    }
  }
  return run;
}

ClassifyRun run_classify(const std::vector<EvalRecord>& records, const RunConfig& cfg) {
  ClassifyRun run;
  run.pairs = stats::build_pairs(records);
  if (run.pairs.empty()) throw InputError("no rotation records to classify; run `convexeff evaluate --rotations` first");
  run.rates = stats::advantage_rates(run.pairs);
  run.curves = stats::advantage_curves(run.pairs);
  const std::uint64_t cv_seed = derive_seed(cfg.seed, {0xC5ULL});
  using stats::Feature;
  run.cv_epsilon = stats::cv_auc(run.pairs, {Feature::delta_epsilon}, cfg.folds, cv_seed);
  run.cv_convexity = stats::cv_auc(run.pairs, {Feature::delta_convexity}, cfg.folds, cv_seed);
  run.cv_both = stats::cv_auc(run.pairs, {Feature::delta_epsilon, Feature::delta_convexity}, cfg.folds, cv_seed);
  run.nested = stats::nested_comparison(run.pairs);
  return run;
}

json table1_json(const ClassifyRun& run) {
  const auto& n = run.nested;
  return json{{"models",
               json::array({fit_json("full", n.full), fit_json("without_delta_epsilon", n.without_epsilon),
                            fit_json("without_delta_convexity", n.without_convexity)})},
              {"likelihood_ratio_tests",
               json::array({lrt_json("delta_epsilon", n.drop_epsilon), lrt_json("delta_convexity", n.drop_convexity)})},
              {"cv_auc",
               json{{"delta_epsilon", cv_json(run.cv_epsilon)},
                    {"delta_convexity", cv_json(run.cv_convexity)},
                    {"both", cv_json(run.cv_both)}}},
              {"advantage",
               json{{"languages", run.rates.languages},
                    {"efficiency_rate", run.rates.efficiency},
                    {"convexity_rate", run.rates.convexity}}},
              {"examples", run.pairs.size()}};
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

json manifest(const std::string& command, const RunConfig& cfg) {
  std::ostringstream eigen, boost;
  eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  boost << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '.' << BOOST_VERSION % 100;
  return json{{"command", command},
              {"version", kVersion},
              {"libraries", json{{"eigen", eigen.str()}, {"boost", boost.str()}}},
              {"config", cfg.to_json()},
              {"seed_derivation",
               "per-task seeds are derive_seed(root, {k, index}) for greedy searches; frontier init uses the root "
               "seed; CV folds use derive_seed(root, {0xC5}); theorem-2 partitions use "
               "derive_seed(root, {0x7432, k, i, attempt})"}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path);
  os << j.dump(2) << '\n';
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory " + dir);
}

}  // namespace convexeff::pipeline
