#include "convexeff/circle.hpp"

#include "convexeff/error.hpp"
#include "convexeff/io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace convexeff::circle {

Universe circle_universe(std::size_t n) {
  if (n == 0 || n % 4 != 0) throw InvalidArgument("circle bin count must be a positive multiple of 4");
  Matrix coords(static_cast<Eigen::Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i)
    coords(static_cast<Eigen::Index>(i), 0) = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
  return Universe(std::move(coords));
}

MeaningModel similarity_meanings(const Universe& universe, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("similarity scale must be positive");
  const std::size_t n = universe.size();
  if (universe.dim() != 1 || n == 0 || n % 4 != 0) throw InvalidArgument("expected a circle universe");
  const std::size_t half = n / 2;
  // Kernel over bin offsets d: |cos| has period pi and is even, so fold d
  // into [0, n/4] before evaluating to make equal offsets bitwise equal.
  std::vector<double> kernel(n);
  double z = 0.0;
  for (std::size_t d = 0; d < n; ++d) {
    const std::size_t r = d % half;
    const std::size_t folded = std::min(r, half - r);
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(folded) / static_cast<double>(n);
    kernel[d] = std::exp(scale * std::abs(std::cos(angle)));
  }
  for (double v : kernel) z += v;
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t u = 0; u < n; ++u)
      m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(u)) = kernel[(u + n - t) % n] / z;
  return MeaningModel(std::move(m), Prior::uniform(n));
}

MeaningModel certainty_meanings(std::size_t n, const Prior& prior) {
  if (prior.size() != n) throw InvalidArgument("prior size does not match bin count");
  Matrix m = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  return MeaningModel(std::move(m), prior);
}

std::size_t arc_count(const HardPartition& partition, int word) {
  std::size_t runs = 0;
  bool inside = false;
  for (int a : partition.assign()) {
    const bool here = a == word;
    if (here && !inside) ++runs;
    inside = here;
  }
  return runs;
}

bool is_segment_convex(const HardPartition& partition) {
  for (std::size_t w = 0; w < partition.word_count(); ++w)
    if (arc_count(partition, static_cast<int>(w)) != 1) return false;
  return true;
}

NonconvexResult find_nonconvex_optimum(const MeaningModel& meanings, const NonconvexSearch& search) {
  const std::size_t n = meanings.size();
  if (n == 0 || n % 4 != 0) throw InvalidArgument("expected circle meanings over a multiple of 4 bins");
  if (!(search.beta_min > 0.0) || !(search.beta_max > search.beta_min) || search.beta_points < 2)
    throw InvalidArgument("invalid beta window");

  NonconvexResult res;
  res.scanned_betas = geometric_grid(search.beta_min, search.beta_max, search.beta_points);
  AnnealOptions opts = search.anneal;
  opts.keep_encoders = true;
  const Frontier frontier = compute_frontier(meanings, res.scanned_betas, opts);

  std::ostringstream report;
  report << "beta,major_categories,arcs\n";
  double best_dist = std::numeric_limits<double>::infinity();
  std::size_t best = frontier.size();
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    const HardPartition mode = mode_partition(frontier.encoders()[i]);
    res.scanned_categories.push_back(mode.word_count());
    report << io::fmt(res.scanned_betas[i]) << ',' << mode.word_count() << ',';
    bool qualifies = mode.word_count() == 2;
    for (std::size_t w = 0; w < mode.word_count(); ++w) {
      const std::size_t arcs = arc_count(mode, static_cast<int>(w));
      report << (w ? " " : "") << arcs;
      if (arcs < 2) qualifies = false;
    }
    report << '\n';
    const double dist = std::abs(std::log(res.scanned_betas[i] / search.target_beta));
    if (qualifies && dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  res.report = report.str();
  if (best == frontier.size()) return res;

  res.found = true;
  res.beta = res.scanned_betas[best];
  res.solution = ba_fixed_point(meanings, res.beta, frontier.encoders()[best], opts.fixed_point);
  const HardPartition mode = mode_partition(res.solution->encoder);
  res.categories = mode.word_count();
  res.arcs.clear();
  for (std::size_t w = 0; w < mode.word_count(); ++w) res.arcs.push_back(arc_count(mode, static_cast<int>(w)));
  const Matrix& q = res.solution->encoder.q();
  const auto h = static_cast<Eigen::Index>(n / 2);
  const auto quarter = static_cast<Eigen::Index>(n / 4);
  res.mirror_gap = std::max((q.row(0) - q.row(h)).cwiseAbs().maxCoeff(),
                            (q.row(quarter) - q.row(quarter + h)).cwiseAbs().maxCoeff());
  return res;
}

double certainty_accuracy_closed_form(const HardPartition& q, const std::vector<std::size_t>& support) {
  if (support.empty()) throw InvalidArgument("empty support");
  std::vector<double> overlap(q.word_count(), 0.0);
  for (std::size_t u : support) overlap.at(static_cast<std::size_t>(q.assign().at(u))) += 1.0;
  const auto a = static_cast<double>(support.size());
  double acc = 0.0;
  for (double c : overlap)
    if (c > 0.0) acc += c / a * std::log2(a / c);
  return acc;
}

CertaintyWorld theorem2_construction(const HardPartition& p, double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0) throw InvalidArgument("support fraction must lie in (0, 1]");
  if (!is_segment_convex(p)) throw InvalidArgument("partition is not convex on the segment");
  const std::size_t n = p.size();
  const std::size_t k = p.word_count();

  // Largest category, ties to the lowest word.
  std::vector<std::size_t> start(k, n), size(k, 0);
  for (std::size_t u = 0; u < n; ++u) {
    const auto w = static_cast<std::size_t>(p.assign()[u]);
    start[w] = std::min(start[w], u);
    ++size[w];
  }
  const auto source = static_cast<std::size_t>(std::max_element(size.begin(), size.end()) - size.begin());
  auto a = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(size[source])));
  a -= a % k;
  if (a < k)
    throw InvalidArgument("a support of " + std::to_string(a) + " bins cannot be split into " + std::to_string(k) +
                          " segments inside the largest category");

  CertaintyWorld world{Prior::uniform(1), {}, static_cast<int>(source), HardPartition(std::vector<int>(n, 0)), {}, {}, 0.0};
  for (std::size_t i = 0; i < a; ++i) world.support.push_back(start[source] + i);
  Vector prior = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t u : world.support) prior(static_cast<Eigen::Index>(u)) = 1.0;
  world.prior = Prior::from_weights(prior);

  // Q: k equal runs over the support; bins before it join the first run and
  // bins after it the last, so every category stays one segment.
  const std::size_t lo = world.support.front();
  const std::size_t seg = a / k;
  std::vector<int> qa(n);
  for (std::size_t u = 0; u < n; ++u) {
    std::size_t w = 0;
    if (u >= lo) w = std::min((u - lo) / seg, k - 1);
    qa[u] = static_cast<int>(w);
  }
  world.q = HardPartition(qa);

  const MeaningModel mm = certainty_meanings(n, world.prior);
  world.p_scores = score(p.to_system(), mm);
  world.q_scores = score(world.q.to_system(), mm);
  world.q_closed_form = certainty_accuracy_closed_form(world.q, world.support);
  return world;
}

void write_encoder_csv(std::ostream& out, const Universe& universe, const NamingSystem& system) {
  if (system.referents() != universe.size()) throw InvalidArgument("encoder size does not match universe");
  out << "angle_rad";
  for (const auto& w : system.words()) out << ",q_" << w;
  out << '\n';
  for (std::size_t t = 0; t < universe.size(); ++t) {
    out << io::fmt(universe.coords()(static_cast<Eigen::Index>(t), 0));
    for (Eigen::Index w = 0; w < system.q().cols(); ++w) out << ',' << io::fmt(system.q()(static_cast<Eigen::Index>(t), w));
    out << '\n';
  }
}

}  // namespace convexeff::circle
