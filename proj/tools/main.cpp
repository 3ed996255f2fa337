#include "pipeline.hpp"

#include "convexeff/error.hpp"
#include "convexeff/io.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace convexeff;
using namespace convexeff::pipeline;

namespace {

std::string in_out(const RunConfig& cfg, const std::string& name) { return (fs::path(cfg.out) / name).string(); }

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path);
  return os;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  return stats::percentile(std::move(v), 0.5);
}

int cmd_frontier(const RunConfig& cfg) {
  const Problem problem = load_problem(cfg);
  ensure_dir(cfg.out);
  std::size_t done = 0;
  const auto total = static_cast<std::size_t>(cfg.beta_points);
  FrontierRun run = run_frontier(problem.meanings, cfg, [&](const FrontierPoint& p, std::size_t words) {
    ++done;
    if (done % 50 == 0 || done == total)
      std::cerr << "frontier: " << done << "/" << total << " beta=" << p.beta << " words=" << words << "\n";
  });

  const auto unconverged = run.frontier.unconverged_betas();
  if (!unconverged.empty() && !cfg.allow_unconverged) {
    std::cerr << "error: fixed point hit the iteration cap at " << unconverged.size() << " beta value(s), first "
              << unconverged.front() << "; rerun with --allow-unconverged to keep the result\n";
    return kExitConvergence;
  }

  {
    auto os = open_out(frontier_csv_path(cfg));
    write_frontier_csv(os, run.frontier);
  }
  write_frontier_sidecar(frontier_sidecar_path(cfg), run.frontier, frontier_fingerprint(cfg, problem.meanings));

  json m = manifest("frontier", cfg);
  m["seconds"] = run.seconds;
  m["fingerprint"] = frontier_fingerprint(cfg, problem.meanings);
  m["unconverged_betas"] = unconverged;
  m["check"] = json{{"accuracy_monotone", run.check.accuracy_monotone},
                    {"complexity_monotone", run.check.complexity_monotone},
                    {"concave", run.check.concave},
                    {"worst_accuracy_drop", run.check.worst_accuracy_drop},
                    {"worst_complexity_drop", run.check.worst_complexity_drop},
                    {"worst_slope_increase", run.check.worst_slope_increase}};
  m["warnings"] = problem.data.warnings;
  write_json(in_out(cfg, "frontier_manifest.json"), m);

  std::cout << "frontier: " << run.frontier.size() << " points in " << run.seconds << " s; monotone "
            << (run.check.accuracy_monotone && run.check.complexity_monotone ? "yes" : "no") << ", concave "
            << (run.check.concave ? "yes" : "no") << "\n";
  return run.check.ok() ? kExitOk : kExitNegative;
}

int cmd_evaluate(const RunConfig& cfg) {
  const Problem problem = load_problem(cfg);
  const Frontier frontier = load_frontier(cfg, problem.meanings, false);
  ensure_dir(cfg.out);
  const auto records = evaluate_languages(problem, frontier, cfg.rotations, cfg.threads);
  {
    auto os = open_out(in_out(cfg, "evaluation.csv"));
    write_evaluation_csv(os, records);
  }
  std::vector<double> conv;
  double min_eps = std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    if (r.rotation != 0) continue;
    conv.push_back(r.convexity);
    min_eps = std::min(min_eps, r.epsilon);
  }
  json m = manifest("evaluate", cfg);
  m["languages"] = conv.size();
  m["rows"] = records.size();
  m["median_convexity"] = median(conv);
  m["min_epsilon_bits"] = min_eps;
  write_json(in_out(cfg, "evaluate_manifest.json"), m);
  std::cout << "evaluate: " << conv.size() << " languages, " << records.size() << " rows; median convexity "
            << median(conv) << ", min epsilon " << min_eps << " bits\n";
  return kExitOk;
}

int cmd_generate(const RunConfig& cfg) {
  const Problem problem = load_problem(cfg);
  const Frontier frontier = load_frontier(cfg, problem.meanings, false);
  ensure_dir(cfg.out);
  const GenerateRun run = run_generate(problem, frontier, cfg);

  // Every recorded system, with convexity filled in where the pool scored it.
  std::map<std::pair<std::size_t, std::size_t>, double> pooled;
  for (const auto& p : run.pool) pooled[{p.trace, p.record}] = p.convexity;
  std::vector<EvalRecord> trace_rows;
  for (std::size_t t = 0; t < run.traces.size(); ++t) {
    const auto& tr = run.traces[t];
    for (std::size_t r = 0; r < tr.records.size(); ++r) {
      const auto& rec = tr.records[r];
      EvalRecord e;
      e.source = tr.algorithm;
      e.seed = tr.seed;
      e.k_target = tr.k_target;
      e.k = rec.k_realized;
      e.step = rec.step;
      e.complexity = rec.scores.complexity;
      e.accuracy = rec.scores.accuracy;
      e.cost = rec.scores.cost;
      const Deviation d = epsilon(rec.scores.complexity, rec.scores.accuracy, frontier);
      e.epsilon = d.epsilon;
      e.beta = d.beta;
      if (auto it = pooled.find({t, r}); it != pooled.end()) e.convexity = it->second;
      trace_rows.push_back(std::move(e));
    }
  }
  {
    auto os = open_out(in_out(cfg, "generator_traces.csv"));
    write_trace_csv(os, trace_rows);
  }
  {
    auto os = open_out(in_out(cfg, "generator_pool.csv"));
    write_trace_csv(os, run.pool);
  }
  write_json(in_out(cfg, "generator_exemplars.json"), exemplar_sidecar(run));

  json seeds = json::array();
  for (const auto& tr : run.traces)
    seeds.push_back(json{{"algorithm", tr.algorithm}, {"k_target", tr.k_target}, {"seed", tr.seed},
                         {"converged", tr.converged}, {"warnings", tr.warnings}});
  json m = manifest("generate", cfg);
  m["seconds"] = run.seconds;
  m["tasks"] = seeds;
  m["pool_size"] = run.pool.size();
  write_json(in_out(cfg, "generate_manifest.json"), m);
  std::cout << "generate: " << run.traces.size() << " traces, " << trace_rows.size() << " recorded systems, pool of "
            << run.pool.size() << " in " << run.seconds << " s\n";
  return kExitOk;
}

int cmd_circle(const RunConfig& cfg) {
  ensure_dir(cfg.out);
  const CircleRun run = run_circle(cfg);
  const auto& t1 = run.theorem1;
  {
    auto os = open_out(in_out(cfg, "circle_scan.csv"));
    os << t1.report;
  }
  if (t1.found) {
    auto os = open_out(in_out(cfg, "circle_encoder.csv"));
    circle::write_encoder_csv(os, run.universe, t1.solution->encoder);
  }

  double worst_p = 0.0, worst_q = 0.0, worst_closed = 0.0;
  {
    auto os = open_out(in_out(cfg, "circle_theorem2.csv"));
    os << "partition,k,source_word,support_bins,p_complexity_bits,p_accuracy_bits,p_cost_bits,q_complexity_bits,"
          "q_accuracy_bits,q_cost_bits,q_closed_form_bits\n";
    for (std::size_t i = 0; i < run.theorem2.size(); ++i) {
      const auto& w = run.theorem2[i];
      const auto k = static_cast<double>(run.theorem2_inputs[i].word_count());
      worst_p = std::max(worst_p, std::abs(w.p_scores.accuracy));
      worst_q = std::max(worst_q, std::abs(w.q_scores.accuracy - std::log2(k)));
      worst_closed = std::max(worst_closed, std::abs(w.q_closed_form - w.q_scores.accuracy));
      os << i << ',' << run.theorem2_inputs[i].word_count() << ',' << w.source_word << ',' << w.support.size() << ','
         << io::fmt(w.p_scores.complexity) << ',' << io::fmt(w.p_scores.accuracy) << ',' << io::fmt(w.p_scores.cost)
         << ',' << io::fmt(w.q_scores.complexity) << ',' << io::fmt(w.q_scores.accuracy) << ','
         << io::fmt(w.q_scores.cost) << ',' << io::fmt(w.q_closed_form) << '\n';
    }
  }
  const bool theorem2_ok = worst_p <= 1e-12 && worst_q <= 1e-9 && worst_closed <= 1e-9;

  json verdict{{"theorem1",
                json{{"found", t1.found},
                     {"beta", t1.found ? json(t1.beta) : json(nullptr)},
                     {"categories", t1.categories},
                     {"arcs", t1.arcs},
                     {"mirror_gap", t1.mirror_gap},
                     {"window", json::array({cfg.circle_beta_min, cfg.circle_beta_max})},
                     {"scanned_categories", t1.scanned_categories}}},
               {"theorem2",
                json{{"partitions", run.theorem2.size()},
                     {"max_abs_p_accuracy_bits", worst_p},
                     {"max_q_accuracy_error_bits", worst_q},
                     {"max_closed_form_error_bits", worst_closed},
                     {"holds", theorem2_ok}}}};
  write_json(in_out(cfg, "circle_verdict.json"), verdict);
  write_json(in_out(cfg, "circle_manifest.json"), manifest("circle", cfg));

  if (t1.found) {
    std::cout << "theorem 1: non-convex optimum found at beta=" << t1.beta << " (arcs";
    for (auto a : t1.arcs) std::cout << ' ' << a;
    std::cout << ", mirror gap " << t1.mirror_gap << ")\n";
  } else {
    std::cout << "theorem 1: no non-convex 2-category optimum in beta [" << cfg.circle_beta_min << ", "
              << cfg.circle_beta_max << "]; see circle_scan.csv\n";
  }
  std::cout << "theorem 2: " << (theorem2_ok ? "holds" : "FAILS") << " on " << run.theorem2.size()
            << " convex partitions\n";
  return t1.found && theorem2_ok ? kExitOk : kExitNegative;
}

int cmd_classify(const RunConfig& cfg, const std::string& input) {
  const std::string path = input.empty() ? in_out(cfg, "evaluation.csv") : input;
  std::ifstream in(path);
  if (!in) throw InputError("cannot open evaluation CSV " + path);
  const auto records = read_evaluation_csv(in);
  ensure_dir(cfg.out);
  const ClassifyRun run = run_classify(records, cfg);
  {
    auto os = open_out(in_out(cfg, "classify_pairs.csv"));
    os << "language,rotation,delta_epsilon,delta_convexity,label\n";
    for (const auto& p : run.pairs)
      os << io::csv_field(p.language) << ',' << p.rotation << ',' << io::fmt(p.delta_epsilon) << ','
         << io::fmt(p.delta_conv) << ',' << p.label << '\n';
  }
  {
    auto os = open_out(in_out(cfg, "advantage_curves.csv"));
    os << "rotation,feature,mean,p025,p975,n\n";
    for (const auto& c : run.curves)
      os << c.rotation << ',' << stats::to_string(c.feature) << ',' << io::fmt(c.mean) << ',' << io::fmt(c.p025)
         << ',' << io::fmt(c.p975) << ',' << c.n << '\n';
  }
  {
    // Worst case over rotations of each language's positive examples.
    std::map<std::string, std::pair<double, double>> worst;
    for (const auto& p : run.pairs) {
      if (p.label != 1) continue;
      auto [it, fresh] = worst.emplace(p.language, std::make_pair(p.delta_epsilon, p.delta_conv));
      if (!fresh) {
        it->second.first = std::min(it->second.first, p.delta_epsilon);
        it->second.second = std::min(it->second.second, p.delta_conv);
      }
    }
    auto os = open_out(in_out(cfg, "classify_advantages.csv"));
    os << "language,min_delta_epsilon,min_delta_convexity,efficiency_advantage,convexity_advantage\n";
    for (const auto& [lang, w] : worst)
      os << io::csv_field(lang) << ',' << io::fmt(w.first) << ',' << io::fmt(w.second) << ','
         << (w.first > 0.0 ? 1 : 0) << ',' << (w.second > 0.0 ? 1 : 0) << '\n';
  }
  {
    auto os = open_out(in_out(cfg, "classify_folds.csv"));
    os << "features,fold,auc\n";
    const std::pair<const char*, const stats::CvResult*> sets[] = {
        {"delta_epsilon", &run.cv_epsilon}, {"delta_convexity", &run.cv_convexity}, {"both", &run.cv_both}};
    for (const auto& [name, cv] : sets)
      for (std::size_t f = 0; f < cv->fold_auc.size(); ++f)
        os << name << ',' << f << ',' << io::fmt(cv->fold_auc[f]) << '\n';
  }
  write_json(in_out(cfg, "table1.json"), table1_json(run));
  json m = manifest("classify", cfg);
  m["input"] = path;
  write_json(in_out(cfg, "classify_manifest.json"), m);
  std::cout << "classify: efficiency advantage " << run.rates.efficiency << ", convexity advantage "
            << run.rates.convexity << " over " << run.rates.languages << " languages; AUC d_eps "
            << run.cv_epsilon.mean_auc << ", d_conv " << run.cv_convexity.mean_auc << ", both "
            << run.cv_both.mean_auc << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Efficiency and convexity of color category systems"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML-style key = value file; flags override it");
  app.fallthrough();
  app.require_subcommand(1, 1);

  RunConfig cfg;
  app.add_option("--data-dir", cfg.data_dir, "Directory with chip.txt, cnum-vhcm-lab-new.txt, term.txt")
      ->capture_default_str();
  app.add_option("--sigma2", cfg.sigma2, "Gaussian meaning variance (CIELAB units squared)")->capture_default_str();
  app.add_option("--prior", cfg.prior, "Need prior: 'uniform' or a weights file")->capture_default_str();
  app.add_option("--beta-min", cfg.beta_min, "Smallest frontier beta")->capture_default_str();
  app.add_option("--beta-max", cfg.beta_max, "Largest frontier beta")->capture_default_str();
  app.add_option("--beta-points", cfg.beta_points, "Geometric frontier grid size")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Root seed")->capture_default_str();
  app.add_option("--seeds", cfg.seeds, "Greedy searches per k")->capture_default_str();
  app.add_option("--k-min", cfg.k_min, "Smallest category count")->capture_default_str();
  app.add_option("--k-max", cfg.k_max, "Largest category count")->capture_default_str();
  app.add_option("--direction", cfg.direction, "Greedy objective on accuracy")
      ->check(CLI::IsMember({"minimize", "maximize"}))
      ->capture_default_str();
  app.add_option("--max-iters", cfg.max_iters, "Greedy sweep cap")->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads for independent tasks")->capture_default_str();
  app.add_option("--out", cfg.out, "Output directory")->capture_default_str();
  app.add_flag("--allow-unconverged", cfg.allow_unconverged, "Keep frontiers with capped fixed-point runs");

  auto* frontier = app.add_subcommand("frontier", "Compute the IB frontier and its encoder sidecar");
  auto* evaluate = app.add_subcommand("evaluate", "Score every WCS language against the frontier");
  evaluate->add_flag("--rotations", cfg.rotations, "Also score the 39 hue rotations of each language");
  auto* generate = app.add_subcommand("generate", "Greedy and agglomerative searches for convex inefficient systems");
  bool smoke = false;
  generate->add_flag("--smoke", smoke, "Small run: 2 seeds, k in {3, 4, 5}");
  generate->add_flag("--record-candidates", cfg.record_candidates, "Also record rejected swap candidates");
  auto* circ = app.add_subcommand("circle", "Angle-domain constructions (non-convex optimum, uninformative convex P)");
  circ->add_option("--circle-bins", cfg.circle_bins, "Angle bins (multiple of 4)")->capture_default_str();
  circ->add_option("--circle-beta-min", cfg.circle_beta_min, "Window start")->capture_default_str();
  circ->add_option("--circle-beta-max", cfg.circle_beta_max, "Window end")->capture_default_str();
  circ->add_option("--circle-beta-points", cfg.circle_beta_points, "Window grid size")->capture_default_str();
  circ->add_option("--similarity-scale", cfg.circle_scale, "Kernel is exp(scale * |cos|)")->capture_default_str();
  circ->add_option("--init-words", cfg.circle_init_words, "Anneal from a random encoder with this many words (0: identity)")
      ->capture_default_str();
  circ->add_option("--theorem2-partitions", cfg.theorem2_partitions, "Random convex partitions per k")
      ->capture_default_str();
  auto* classify = app.add_subcommand("classify", "Attested-versus-rotated discrimination from evaluate's CSV");
  std::string classify_input;
  classify->add_option("--input", classify_input, "Evaluation CSV (default <out>/evaluation.csv)");
  classify->add_option("--folds", cfg.folds, "Cross-validation folds")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (generate->parsed() && smoke) {
      cfg.seeds = 2;
      cfg.k_min = 3;
      cfg.k_max = 5;
    }
    cfg.validate();
    if (frontier->parsed()) return cmd_frontier(cfg);
    if (evaluate->parsed()) return cmd_evaluate(cfg);
    if (generate->parsed()) return cmd_generate(cfg);
    if (circ->parsed()) return cmd_circle(cfg);
    if (classify->parsed()) return cmd_classify(cfg, classify_input);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNegative;
  }
  return kExitInput;
}
