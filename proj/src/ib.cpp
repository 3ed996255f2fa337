#include "convexeff/ib.hpp"

#include "convexeff/error.hpp"
#include "convexeff/rng.hpp"
#include "convexeff/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace convexeff {

namespace {

constexpr double kInvLn2 = 1.4426950408889634;
constexpr double kInf = std::numeric_limits<double>::infinity();

using RowArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Joint statistics of an encoder under a meaning model.
struct Joint {
  Vector marginal;  // q(w)
  Matrix word_referent;  // p(w, u)
};

Joint joint(const Matrix& q, const MeaningModel& mm) {
  const Vector& p = mm.prior().p();
  Joint j;
  j.marginal = q.transpose() * p;
  Matrix weighted = q.array().colwise() * p.array();
  j.word_referent.noalias() = weighted.transpose() * mm.m();
  return j;
}

// Elementwise log with log(0) replaced by 0, for use where the factor
// multiplying it is zero.
template <typename A>
typename A::PlainObject safe_log(const Eigen::ArrayBase<A>& a) {
  return (a > 0.0).select(a.max(1e-300).log(), 0.0);
}

// I(M;W) in bits.
double complexity_of(const Matrix& q, const Vector& marginal, const Vector& p) {
  const RowArray qa = q.array();
  const Eigen::ArrayXd log_marg = safe_log(marginal.array());
  const Eigen::ArrayXd rows = (qa * (safe_log(qa).rowwise() - log_marg.transpose())).rowwise().sum();
  double total = 0.0;
  for (Eigen::Index t = 0; t < q.rows(); ++t)
    if (p[t] > 0.0) total += p[t] * rows[t];
  return std::max(0.0, total * kInvLn2);
}

// I(W;U) in bits from p(w,u). Wherever p(w,u) > 0, q(w) and p(u) are too.
double accuracy_of(const Matrix& pwu, const Vector& marginal, const Vector& pu) {
  const RowArray a = pwu.array();
  const RowArray logs =
      (safe_log(a).colwise() - safe_log(marginal.array())).rowwise() - safe_log(pu.array()).transpose();
  const double total = (a * logs).sum();
  return std::max(0.0, total * kInvLn2);
}

Vector referent_marginal(const MeaningModel& mm) { return mm.m().transpose() * mm.prior().p(); }

// Per-row negative entropy sum_u m_t(u) ln m_t(u).
Vector row_neg_entropy(const Matrix& m) {
  Vector h(m.rows());
  for (Eigen::Index t = 0; t < m.rows(); ++t) {
    double s = 0.0;
    for (Eigen::Index u = 0; u < m.cols(); ++u) {
      const double v = m(t, u);
      if (v > 0.0) s += v * std::log(v);
    }
    h[t] = s;
  }
  return h;
}

// Precomputed quantities shared by every iteration for one meaning model.
struct SolverContext {
  const MeaningModel& mm;
  Vector pu;
  Vector neg_entropy;
  bool meanings_have_zeros;
  Matrix support;  // 1 where m_t(u) > 0, used only with zeros present

  explicit SolverContext(const MeaningModel& model)
      : mm(model), pu(referent_marginal(model)), neg_entropy(row_neg_entropy(model.m())) {
    meanings_have_zeros = (model.m().array() <= 0.0).any();
    if (meanings_have_zeros) support = (model.m().array() > 0.0).cast<double>().matrix();
  }
};

struct State {
  Matrix q;
  Vector marginal;
  Matrix decoder;
  double complexity = 0.0;
  double accuracy = 0.0;
  double objective = 0.0;
};

void evaluate(State& s, const SolverContext& ctx, double beta) {
  Joint j = joint(s.q, ctx.mm);
  s.marginal = std::move(j.marginal);
  s.complexity = complexity_of(s.q, s.marginal, ctx.mm.prior().p());
  s.accuracy = accuracy_of(j.word_referent, s.marginal, ctx.pu);
  s.objective = s.complexity - beta * s.accuracy;
  s.decoder = std::move(j.word_referent);
  for (Eigen::Index w = 0; w < s.decoder.rows(); ++w) {
    if (s.marginal[w] > 0.0) {
      s.decoder.row(w) /= s.marginal[w];
    } else {
      s.decoder.row(w) = ctx.pu.transpose();
    }
  }
}

// D[m_t || m_hat_w] in nats for every (t, w).
Matrix divergences(const Matrix& decoder, const SolverContext& ctx) {
  const Matrix log_dec = safe_log(decoder.array()).matrix();
  Matrix kl = (-(ctx.mm.m() * log_dec.transpose())).colwise() + ctx.neg_entropy;
  if ((decoder.array() <= 0.0).any()) {
    const Matrix dec_zero = (decoder.array() <= 0.0).cast<double>().matrix();
    const Matrix& support = ctx.meanings_have_zeros
                                ? ctx.support
                                : Matrix::Ones(ctx.mm.m().rows(), ctx.mm.m().cols()).eval();
    const Matrix blocked = support * dec_zero.transpose();
    kl = (blocked.array() > 0.0).select(kInf, kl.array()).matrix();
  }
  return kl;
}

// q(w|m_t) proportional to q(w) exp(-beta D[m_t || m_hat_w]).
Matrix encoder_update(const Vector& marginal, const Matrix& decoder, const SolverContext& ctx, double beta) {
  const Eigen::ArrayXd log_marg = (marginal.array() > 0.0).select(marginal.array().max(1e-300).log(), -kInf);
  RowArray logits;
  if (beta == 0.0) {
    logits = log_marg.transpose().replicate(static_cast<Eigen::Index>(ctx.mm.size()), 1);
  } else {
    logits = (-beta * divergences(decoder, ctx).array()).rowwise() + log_marg.transpose();
  }
  const Eigen::ArrayXd top = logits.rowwise().maxCoeff();
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    if (!std::isfinite(top[t])) {
      throw ConvergenceError("ba_fixed_point: every word has infinite divergence for referent " +
                             std::to_string(t));
    }
  }
  const RowArray shifted = logits.colwise() - top;
  // Weights below exp(-500) are set to zero: exactly zero for dead words, and
  // no subnormal values downstream, which slow the matrix products badly.
  RowArray e = (shifted < -500.0).select(0.0, shifted.exp());
  e.colwise() /= e.rowwise().sum();
  return e.matrix();
}

double max_row_l1(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().rowwise().sum().maxCoeff();
}

// Rows re-summed to exactly one after floating-point drift.
void renormalize_rows(Matrix& q) {
  for (Eigen::Index t = 0; t < q.rows(); ++t) q.row(t) /= q.row(t).sum();
}

}  // namespace

double complexity(const NamingSystem& system, const MeaningModel& meanings) {
  if (system.referents() != meanings.size()) throw InvalidArgument("complexity: size mismatch");
  const Vector marginal = system.q().transpose() * meanings.prior().p();
  return complexity_of(system.q(), marginal, meanings.prior().p());
}

double accuracy(const NamingSystem& system, const MeaningModel& meanings) {
  if (system.referents() != meanings.size()) throw InvalidArgument("accuracy: size mismatch");
  const Joint j = joint(system.q(), meanings);
  return accuracy_of(j.word_referent, j.marginal, referent_marginal(meanings));
}

double meaning_information(const MeaningModel& meanings) {
  const Vector pu = referent_marginal(meanings);
  const Vector& p = meanings.prior().p();
  const Matrix& m = meanings.m();
  double total = 0.0;
  for (Eigen::Index t = 0; t < m.rows(); ++t) {
    if (p[t] <= 0.0) continue;
    double row = 0.0;
    for (Eigen::Index u = 0; u < m.cols(); ++u) {
      if (m(t, u) > 0.0) row += m(t, u) * std::log(m(t, u) / pu[u]);
    }
    total += p[t] * row;
  }
  return std::max(0.0, total * kInvLn2);
}

double communicative_cost(const NamingSystem& system, const MeaningModel& meanings) {
  return std::max(0.0, meaning_information(meanings) - accuracy(system, meanings));
}

IBScores score(const NamingSystem& system, const MeaningModel& meanings) {
  if (system.referents() != meanings.size()) throw InvalidArgument("score: size mismatch");
  const Joint j = joint(system.q(), meanings);
  IBScores s;
  s.complexity = complexity_of(system.q(), j.marginal, meanings.prior().p());
  s.accuracy = accuracy_of(j.word_referent, j.marginal, referent_marginal(meanings));
  s.cost = std::max(0.0, meaning_information(meanings) - s.accuracy);
  return s;
}

double ib_objective(const NamingSystem& system, const MeaningModel& meanings, double beta) {
  if (!(beta >= 0.0)) throw InvalidArgument("ib_objective: beta must be nonnegative");
  const IBScores s = score(system, meanings);
  return s.complexity - beta * s.accuracy;
}

IBSolution ba_fixed_point(const MeaningModel& meanings, double beta, const NamingSystem& init,
                          const FixedPointOptions& options) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidArgument("ba_fixed_point: beta must be finite and >= 0");
  if (init.referents() != meanings.size()) throw InvalidArgument("ba_fixed_point: init size mismatch");
  const SolverContext ctx(meanings);

  State s;
  s.q = init.q();
  evaluate(s, ctx, beta);
  std::vector<double> trace;
  if (options.record_objective) trace.push_back(s.objective);

  int it = 0;
  bool converged = false;
  // One plain update of s; true when the stopping rule holds.
  auto plain_step = [&] {
    ++it;
    Matrix next = encoder_update(s.marginal, s.decoder, ctx, beta);
    const double change = max_row_l1(next, s.q);
    const double previous = s.objective;
    s.q = std::move(next);
    evaluate(s, ctx, beta);
    if (options.record_objective) trace.push_back(s.objective);
    return std::abs(previous - s.objective) < options.objective_tolerance && change < options.encoder_tolerance;
  };

  // Largest extrapolation length tried; grows after accepted full-length
  // steps and shrinks after rejections.
  double step_max = 4.0;
  while (it < options.max_iterations) {
    if (!options.accelerate || it + 3 > options.max_iterations) {
      if ((converged = plain_step())) break;
      continue;
    }
    // Squared extrapolation over two plain updates, kept only if one more
    // update from the extrapolated encoder beats the second plain iterate.
    const Matrix x0 = s.q;
    if ((converged = plain_step())) break;
    const Matrix x1 = s.q;
    if ((converged = plain_step())) break;
    const Matrix r = x1 - x0;
    const Matrix v = s.q - x1 - r;
    const double rn = r.norm();
    const double vn = v.norm();
    if (!(vn > 0.0) || !(rn > 0.0)) continue;
    const double alpha = std::clamp(-rn / vn, -step_max, -1.0);
    State trial;
    trial.q = (x0 - 2.0 * alpha * r + alpha * alpha * v).cwiseMax(0.0);
    bool usable = true;
    for (Eigen::Index t = 0; t < trial.q.rows() && usable; ++t) {
      const double sum = trial.q.row(t).sum();
      if (!(sum > 0.0) || !std::isfinite(sum)) usable = false;
      else trial.q.row(t) /= sum;
    }
    if (usable) {
      evaluate(trial, ctx, beta);
      ++it;
      trial.q = encoder_update(trial.marginal, trial.decoder, ctx, beta);
      evaluate(trial, ctx, beta);
      usable = trial.objective < s.objective;
    }
    if (usable) {
      s = std::move(trial);
      if (options.record_objective) trace.push_back(s.objective);
      if (alpha == -step_max) step_max *= 4.0;
    } else {
      step_max = std::max(4.0, step_max / 4.0);
    }
  }
  renormalize_rows(s.q);

  return IBSolution{beta,
                    NamingSystem(std::move(s.q), init.words()),
                    std::move(s.marginal),
                    std::move(s.decoder),
                    s.objective,
                    s.complexity,
                    s.accuracy,
                    it,
                    converged,
                    std::move(trace)};
}

double self_consistency_gap(const IBSolution& solution, const MeaningModel& meanings) {
  const SolverContext ctx(meanings);
  const Matrix next = encoder_update(solution.marginal, solution.decoder, ctx, solution.beta);
  return max_row_l1(next, solution.encoder.q());
}

Frontier::Frontier(std::vector<FrontierPoint> points, std::vector<NamingSystem> encoders)
    : points_(std::move(points)), encoders_(std::move(encoders)) {
  if (!encoders_.empty() && encoders_.size() != points_.size()) {
    throw InvalidArgument("Frontier: encoder count does not match point count");
  }
}

std::vector<double> Frontier::betas() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.beta);
  return out;
}

std::vector<double> Frontier::unconverged_betas() const {
  std::vector<double> out;
  for (const auto& p : points_)
    if (!p.converged) out.push_back(p.beta);
  return out;
}

FrontierCheck Frontier::check(double monotone_tol, double slope_tol, double min_chord) const {
  FrontierCheck c;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const auto& a = points_[i - 1];
    const auto& b = points_[i];
    if (!(b.beta > a.beta)) c.betas_increasing = false;
    c.worst_accuracy_drop = std::max(c.worst_accuracy_drop, a.accuracy - b.accuracy);
    c.worst_complexity_drop = std::max(c.worst_complexity_drop, a.complexity - b.complexity);
  }
  c.accuracy_monotone = c.worst_accuracy_drop <= monotone_tol;
  c.complexity_monotone = c.worst_complexity_drop <= monotone_tol;

  // Chords between points at least min_chord apart in complexity; for a
  // concave curve any such chain has nonincreasing slopes.
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (kept.empty() || points_[i].complexity - points_[kept.back()].complexity >= min_chord) kept.push_back(i);
  }
  double previous_slope = kInf;
  for (std::size_t i = 1; i < kept.size(); ++i) {
    const auto& a = points_[kept[i - 1]];
    const auto& b = points_[kept[i]];
    const double slope = (b.accuracy - a.accuracy) / (b.complexity - a.complexity);
    if (std::isfinite(previous_slope)) c.worst_slope_increase = std::max(c.worst_slope_increase, slope - previous_slope);
    previous_slope = slope;
  }
  c.concave = c.worst_slope_increase <= slope_tol;
  return c;
}

double Frontier::accuracy_bound(double c) const {
  if (points_.empty()) throw InvalidArgument("Frontier: empty");
  for (const auto& p : points_)
    if (p.complexity >= c) return p.accuracy;
  return points_.back().accuracy;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw InvalidArgument("geometric_grid: need 0 < lo <= hi and n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

NamingSystem perturbed_identity(std::size_t n, double noise, std::uint64_t seed) {
  Rng rng(seed);
  const auto size = static_cast<Eigen::Index>(n);
  Matrix q = Matrix::Identity(size, size);
  for (Eigen::Index t = 0; t < size; ++t)
    for (Eigen::Index w = 0; w < size; ++w) q(t, w) += noise * rng.uniform();
  renormalize_rows(q);
  return NamingSystem(std::move(q));
}

NamingSystem random_encoder(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (n == 0 || k == 0) throw InvalidArgument("random_encoder: empty shape");
  Rng rng(seed);
  Matrix q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (Eigen::Index t = 0; t < q.rows(); ++t)
    for (Eigen::Index w = 0; w < q.cols(); ++w) q(t, w) = 0.5 + rng.uniform();
  renormalize_rows(q);
  return NamingSystem(std::move(q));
}

namespace {

// Drops near-dead words and merges words with (near-)identical decoders.
Matrix compact_encoder(const IBSolution& sol, double prune_mass, double merge_tol) {
  const Matrix& q = sol.encoder.q();
  const Eigen::Index k = q.cols();
  std::vector<Eigen::Index> keep;
  std::vector<Eigen::Index> owner(static_cast<std::size_t>(k), -1);
  for (Eigen::Index w = 0; w < k; ++w) {
    if (sol.marginal[w] < prune_mass) continue;
    Eigen::Index target = -1;
    for (Eigen::Index kept : keep) {
      if ((sol.decoder.row(w) - sol.decoder.row(kept)).cwiseAbs().sum() < merge_tol) {
        target = kept;
        break;
      }
    }
    if (target < 0) {
      keep.push_back(w);
      target = w;
    }
    owner[static_cast<std::size_t>(w)] = target;
  }
  if (keep.empty()) keep.push_back(0), owner[0] = 0;

  Matrix out = Matrix::Zero(q.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    for (Eigen::Index w = 0; w < k; ++w) {
      if (owner[static_cast<std::size_t>(w)] == keep[c]) out.col(static_cast<Eigen::Index>(c)) += q.col(w);
    }
  }
  for (Eigen::Index t = 0; t < out.rows(); ++t) {
    const double s = out.row(t).sum();
    if (s > 0.0) {
      out.row(t) /= s;
    } else {
      out.row(t).setConstant(1.0 / static_cast<double>(out.cols()));
    }
  }
  return out;
}

// Runs the fixed point in chunks, compacting between chunks so that words
// which have collapsed onto each other stop costing a column per iteration.
IBSolution solve_compacting(const MeaningModel& meanings, double beta, const NamingSystem& init,
                            const AnnealOptions& options) {
  FixedPointOptions fp = options.fixed_point;
  const int cap = fp.max_iterations;
  const int chunk = options.compact_every > 0 ? options.compact_every : cap;
  int spent = 0;
  NamingSystem start = init;
  while (true) {
    fp.max_iterations = std::min(chunk, cap - spent);
    IBSolution sol = ba_fixed_point(meanings, beta, start, fp);
    spent += sol.iterations;
    sol.iterations = spent;
    if (sol.converged || spent >= cap) return sol;
    Matrix compact = compact_encoder(sol, options.prune_mass, options.merge_tolerance);
    if (static_cast<std::size_t>(compact.cols()) == sol.encoder.word_count()) {
      start = std::move(sol.encoder);
    } else {
      start = NamingSystem(std::move(compact));
    }
  }
}

}  // namespace

Frontier compute_frontier(const MeaningModel& meanings, std::span<const double> betas, const AnnealOptions& options) {
  if (betas.empty()) throw InvalidArgument("compute_frontier: empty beta grid");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] > 0.0)) throw InvalidArgument("compute_frontier: betas must be positive");
    if (i > 0 && !(betas[i] > betas[i - 1])) throw InvalidArgument("compute_frontier: betas must be strictly increasing");
  }
  std::vector<FrontierPoint> points(betas.size());
  std::vector<NamingSystem> encoders;
  std::vector<std::optional<NamingSystem>> stored(options.keep_encoders ? betas.size() : 0);

  NamingSystem current = options.init_words == 0
                             ? perturbed_identity(meanings.size(), options.init_noise, options.seed)
                             : random_encoder(meanings.size(), options.init_words, options.seed);
  for (std::size_t idx = betas.size(); idx-- > 0;) {
    const double beta = betas[idx];
    IBSolution sol = solve_compacting(meanings, beta, current, options);
    points[idx] = FrontierPoint{beta, sol.complexity, sol.accuracy, sol.objective, sol.converged, sol.iterations};
    if (options.progress) options.progress(points[idx], sol.encoder.word_count());
    if (options.keep_encoders) stored[idx] = sol.encoder;
    current = NamingSystem(compact_encoder(sol, options.prune_mass, options.merge_tolerance));
  }
  if (options.keep_encoders) {
    encoders.reserve(stored.size());
    for (auto& e : stored) encoders.push_back(std::move(*e));
  }
  return Frontier(std::move(points), std::move(encoders));
}

Deviation epsilon(double complexity_bits, double accuracy_bits, const Frontier& frontier) {
  if (frontier.size() == 0) throw InvalidArgument("epsilon: empty frontier");
  Deviation best{kInf, 0.0};
  for (const auto& p : frontier.points()) {
    if (!(p.beta > 0.0)) throw InvalidArgument("epsilon: frontier betas must be positive");
    const double gap = (complexity_bits - p.beta * accuracy_bits - p.f_star) / p.beta;
    if (gap < best.epsilon) best = Deviation{gap, p.beta};
  }
  return best;
}

Deviation epsilon(const NamingSystem& system, const MeaningModel& meanings, const Frontier& frontier) {
  const IBScores s = score(system, meanings);
  return epsilon(s.complexity, s.accuracy, frontier);
}

void write_frontier_csv(std::ostream& out, const Frontier& frontier) {
  out << "beta,complexity_bits,accuracy_bits,F_star\n";
  for (const auto& p : frontier.points()) {
    out << io::fmt(p.beta) << ',' << io::fmt(p.complexity) << ',' << io::fmt(p.accuracy) << ','
        << io::fmt(p.f_star) << '\n';
  }
}

Frontier read_frontier_csv(std::istream& in) {
  const io::CsvTable table = io::read_csv(in);
  const auto beta = table.column("beta");
  const auto comp = table.column("complexity_bits");
  const auto acc = table.column("accuracy_bits");
  const auto fstar = table.column("F_star");
  std::vector<FrontierPoint> points;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    points.push_back(FrontierPoint{io::parse_double(table.rows[r][beta]), io::parse_double(table.rows[r][comp]),
                                   io::parse_double(table.rows[r][acc]), io::parse_double(table.rows[r][fstar]), true});
  }
  return Frontier(std::move(points));
}

namespace {
constexpr char kSidecarMagic[8] = {'C', 'V', 'X', 'F', 'R', 'N', 'T', '\0'};

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw InputError(path + ": truncated frontier sidecar");
  return v;
}
}  // namespace

void write_frontier_sidecar(const std::string& path, const Frontier& frontier, const std::string& fingerprint) {
  if (!frontier.has_encoders()) throw InvalidArgument("write_frontier_sidecar: frontier has no stored encoders");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path);
  os.write(kSidecarMagic, sizeof kSidecarMagic);
  put<std::uint32_t>(os, kFrontierSidecarVersion);
  put<std::uint64_t>(os, fingerprint.size());
  os.write(fingerprint.data(), static_cast<std::streamsize>(fingerprint.size()));
  put<std::uint64_t>(os, frontier.size());
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    const auto& p = frontier.points()[i];
    const Matrix& q = frontier.encoders()[i].q();
    put(os, p.beta);
    put(os, p.complexity);
    put(os, p.accuracy);
    put(os, p.f_star);
    put<std::uint8_t>(os, p.converged ? 1 : 0);
    put<std::uint64_t>(os, static_cast<std::uint64_t>(q.rows()));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(q.cols()));
    // Exact zeros are common at large beta; store (index, value) pairs when
    // that is smaller than the dense block.
    const auto nnz = static_cast<std::uint64_t>((q.array() != 0.0).count());
    const bool sparse = nnz * (sizeof(std::uint64_t) + sizeof(double)) < sizeof(double) * static_cast<std::uint64_t>(q.size());
    put<std::uint8_t>(os, sparse ? 1 : 0);
    if (!sparse) {
      os.write(reinterpret_cast<const char*>(q.data()), static_cast<std::streamsize>(sizeof(double) * q.size()));
      continue;
    }
    put<std::uint64_t>(os, nnz);
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      const double v = q.data()[j];
      if (v == 0.0) continue;
      put<std::uint64_t>(os, static_cast<std::uint64_t>(j));
      put<double>(os, v);
    }
  }
  if (!os) throw InputError("failed writing " + path);
}

SidecarContents read_frontier_sidecar(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open frontier sidecar " + path);
  char magic[8];
  if (!is.read(magic, sizeof magic) || !std::equal(magic, magic + 8, kSidecarMagic)) {
    throw InputError(path + ": not a frontier sidecar");
  }
  SidecarContents out;
  out.version = get<std::uint32_t>(is, path);
  if (out.version != kFrontierSidecarVersion) {
    throw InputError(path + ": sidecar version " + std::to_string(out.version) + ", expected " +
                     std::to_string(kFrontierSidecarVersion));
  }
  const auto flen = get<std::uint64_t>(is, path);
  out.fingerprint.resize(flen);
  if (!is.read(out.fingerprint.data(), static_cast<std::streamsize>(flen))) throw InputError(path + ": truncated");
  const auto count = get<std::uint64_t>(is, path);
  std::vector<FrontierPoint> points;
  std::vector<NamingSystem> encoders;
  for (std::uint64_t i = 0; i < count; ++i) {
    FrontierPoint p;
    p.beta = get<double>(is, path);
    p.complexity = get<double>(is, path);
    p.accuracy = get<double>(is, path);
    p.f_star = get<double>(is, path);
    p.converged = get<std::uint8_t>(is, path) != 0;
    const auto rows = get<std::uint64_t>(is, path);
    const auto cols = get<std::uint64_t>(is, path);
    Matrix q = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    if (get<std::uint8_t>(is, path) == 0) {
      if (!is.read(reinterpret_cast<char*>(q.data()), static_cast<std::streamsize>(sizeof(double) * q.size()))) {
        throw InputError(path + ": truncated encoder data");
      }
    } else {
      const auto nnz = get<std::uint64_t>(is, path);
      for (std::uint64_t e = 0; e < nnz; ++e) {
        const auto j = get<std::uint64_t>(is, path);
        const auto v = get<double>(is, path);
        if (j >= static_cast<std::uint64_t>(q.size())) throw InputError(path + ": encoder index out of range");
        q.data()[j] = v;
      }
    }
    points.push_back(p);
    encoders.emplace_back(std::move(q));
  }
  out.frontier = Frontier(std::move(points), std::move(encoders));
  return out;
}

}  // namespace convexeff
