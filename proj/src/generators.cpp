#include "convexeff/generators.hpp"

#include "convexeff/convexity.hpp"
#include "convexeff/error.hpp"
#include "convexeff/hull.hpp"
#include "convexeff/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace convexeff::gen {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
// Swaps must beat the current accuracy by more than this (nats) to count as
// improvements; guards against cycling on rounding noise.
constexpr double kImprovement = 1e-12;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

Matrix pairwise_sq_distances(const Matrix& a, const Matrix& b) {
  Matrix d(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  return d;
}

// H(W) in bits for category masses q_w.
double mass_entropy_bits(const std::vector<double>& mass) {
  double h = 0.0;
  for (double q : mass) h -= xlogx(q);
  return h / kLn2;
}

void check_dims(const Universe& universe, const MeaningModel& meanings) {
  if (meanings.size() != universe.size())
    throw InvalidArgument("meaning model size " + std::to_string(meanings.size()) + " does not match universe size " +
                          std::to_string(universe.size()));
}

}  // namespace

Direction parse_direction(const std::string& s) {
  if (s == "minimize" || s == "min") return Direction::minimize;
  if (s == "maximize" || s == "max") return Direction::maximize;
  throw InvalidArgument("unknown search direction '" + s + "' (expected minimize or maximize)");
}

std::string to_string(Direction d) { return d == Direction::minimize ? "minimize" : "maximize"; }

std::vector<int> nearest_centroids(const Matrix& centroids, const Universe& universe) {
  if (centroids.rows() == 0) throw InvalidArgument("centroid set is empty");
  if (centroids.cols() != universe.dim()) throw InvalidArgument("centroid dimension does not match universe");
  const Matrix& x = universe.coords();
  std::vector<int> out(universe.size());
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    int best = 0;
    double best_d = (x.row(t) - centroids.row(0)).squaredNorm();
    for (Eigen::Index c = 1; c < centroids.rows(); ++c) {
      const double d = (x.row(t) - centroids.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    out[static_cast<std::size_t>(t)] = best;
  }
  return out;
}

HardPartition voronoi_partition(const Matrix& exemplars, const Universe& universe) {
  return HardPartition(nearest_centroids(exemplars, universe));
}

std::size_t count_categories(const Matrix& centroids, const Universe& universe) {
  const auto assign = nearest_centroids(centroids, universe);
  std::vector<bool> used(static_cast<std::size_t>(centroids.rows()), false);
  for (int a : assign) used[static_cast<std::size_t>(a)] = true;
  return static_cast<std::size_t>(std::count(used.begin(), used.end(), true));
}

// ---------------------------------------------------------------------------
// HardAccuracy

HardAccuracy::HardAccuracy(const MeaningModel& meanings) : weighted_(meanings.m()) {
  const Vector& p = meanings.prior().p();
  for (Eigen::Index t = 0; t < weighted_.rows(); ++t) weighted_.row(t) *= p(t);
  const Eigen::RowVectorXd pu = weighted_.colwise().sum();
  entropy_u_ = 0.0;
  for (Eigen::Index u = 0; u < pu.size(); ++u) entropy_u_ -= xlogx(pu(u));
}

double HardAccuracy::category_term(const Eigen::Ref<const Eigen::RowVectorXd>& s) {
  double sum = 0.0;
  double q = 0.0;
  for (Eigen::Index u = 0; u < s.size(); ++u) {
    sum += xlogx(s(u));
    if (s(u) > 0.0) q += s(u);
  }
  return sum - xlogx(q);
}

double HardAccuracy::operator()(const std::vector<int>& assign, std::size_t k) const {
  if (assign.size() != size()) throw InvalidArgument("assignment size does not match meaning model");
  Matrix s = Matrix::Zero(static_cast<Eigen::Index>(k), weighted_.cols());
  for (std::size_t t = 0; t < assign.size(); ++t) {
    if (assign[t] < 0 || static_cast<std::size_t>(assign[t]) >= k) throw InvalidArgument("category index out of range");
    s.row(assign[t]) += weighted_.row(static_cast<Eigen::Index>(t));
  }
  double total = entropy_u_;
  for (Eigen::Index w = 0; w < s.rows(); ++w) total += category_term(s.row(w));
  return std::max(0.0, total / kLn2);
}

// ---------------------------------------------------------------------------
// Shared per-category state for hard partitions under the fast evaluator.

namespace {

struct CategoryState {
  const HardAccuracy* eval = nullptr;
  std::vector<int> assign;
  std::vector<int> count;
  Matrix s;                // k x n, p(w, u)
  std::vector<double> g;   // category_term per row
  std::vector<double> mass;
  double total = 0.0;      // nats, includes H(U)

  void rebuild(std::size_t k) {
    const auto n = static_cast<Eigen::Index>(eval->size());
    s = Matrix::Zero(static_cast<Eigen::Index>(k), n);
    count.assign(k, 0);
    for (std::size_t t = 0; t < assign.size(); ++t) {
      s.row(assign[t]) += eval->row(t);
      ++count[static_cast<std::size_t>(assign[t])];
    }
    g.assign(k, 0.0);
    mass.assign(k, 0.0);
    total = eval->referent_entropy();
    for (std::size_t w = 0; w < k; ++w) {
      if (count[w] == 0) continue;
      g[w] = HardAccuracy::category_term(s.row(static_cast<Eigen::Index>(w)));
      mass[w] = s.row(static_cast<Eigen::Index>(w)).sum();
      total += g[w];
    }
  }

  std::size_t realized() const {
    return static_cast<std::size_t>(std::count_if(count.begin(), count.end(), [](int c) { return c > 0; }));
  }
};

// A referent moving between categories.
struct Move {
  int from;
  int to;
  std::size_t t;
};

// Rescores the categories touched by `moves`. Categories listed in `dropped`
// disappear entirely; a nonempty `fresh_members` forms one new category. Returns the new total in nats and, when requested, the
// new masses of every touched category.
class MoveScorer {
 public:
  explicit MoveScorer(const HardAccuracy& eval) : eval_(eval), row_(eval.size()) {}

  double rescore(const CategoryState& st, std::vector<Move>& moves, const std::vector<int>& dropped,
                 const std::vector<std::size_t>& fresh_members, double* fresh_mass = nullptr,
                 std::vector<std::pair<int, double>>* touched_mass = nullptr) {
    double total = st.total;
    for (int w : dropped) total -= st.g[static_cast<std::size_t>(w)];

    if (!fresh_members.empty()) {
      row_.setZero();
      for (std::size_t t : fresh_members) row_ += eval_.row(t);
      total += HardAccuracy::category_term(row_);
      if (fresh_mass) *fresh_mass = row_.sum();
    }

    // Group the remaining moves by the surviving category they touch.
    adjust_.clear();
    for (const Move& m : moves) {
      if (m.from >= 0 && !is_dropped(m.from, dropped)) adjust_.push_back({m.from, m.t, -1});
      if (m.to >= 0 && !is_dropped(m.to, dropped)) adjust_.push_back({m.to, m.t, +1});
    }
    std::sort(adjust_.begin(), adjust_.end(),
              [](const Adjust& a, const Adjust& b) { return a.w != b.w ? a.w < b.w : a.t < b.t; });
    for (std::size_t a = 0; a < adjust_.size();) {
      const int w = adjust_[a].w;
      const auto wi = static_cast<std::size_t>(w);
      int members = st.count[wi];
      row_ = st.s.row(w);
      std::size_t b = a;
      for (; b < adjust_.size() && adjust_[b].w == w; ++b) {
        members += adjust_[b].sign;
        if (adjust_[b].sign > 0)
          row_ += eval_.row(adjust_[b].t);
        else
          row_ -= eval_.row(adjust_[b].t);
      }
      total -= st.g[wi];
      double mass = 0.0;
      if (members > 0) {
        total += HardAccuracy::category_term(row_);
        mass = row_.sum();
      }
      if (touched_mass) touched_mass->push_back({w, mass});
      a = b;
    }
    return total;
  }

 private:
  struct Adjust {
    int w;
    std::size_t t;
    int sign;
  };
  static bool is_dropped(int w, const std::vector<int>& dropped) {
    return std::find(dropped.begin(), dropped.end(), w) != dropped.end();
  }

  const HardAccuracy& eval_;
  Eigen::RowVectorXd row_;
  std::vector<Adjust> adjust_;
};

IBScores scores_from(double total_nats, const std::vector<double>& mass, double info_mu) {
  IBScores sc;
  sc.accuracy = std::max(0.0, total_nats / kLn2);
  sc.complexity = mass_entropy_bits(mass);
  sc.cost = std::max(0.0, info_mu - sc.accuracy);
  return sc;
}

}  // namespace

// ---------------------------------------------------------------------------
// Greedy exemplar swapping

GeneratorTrace greedy_swap_search(const Universe& universe, const MeaningModel& meanings, std::size_t k,
                                  int max_iters, std::uint64_t seed, Direction direction, bool record_candidates) {
  check_dims(universe, meanings);
  const std::size_t n = universe.size();
  if (k < 1 || k > n) throw InvalidArgument("k must lie in [1, " + std::to_string(n) + "], got " + std::to_string(k));
  if (max_iters < 0) throw InvalidArgument("max_iters must be nonnegative");

  GeneratorTrace trace;
  trace.algorithm = "greedy";
  trace.seed = seed;
  trace.k_target = k;
  trace.direction = direction;

  const Matrix& x = universe.coords();
  const Matrix dist = pairwise_sq_distances(x, x);
  const HardAccuracy eval(meanings);
  const double info_mu = meaning_information(meanings);

  Rng rng(seed);
  std::vector<std::size_t> chips(n);
  std::iota(chips.begin(), chips.end(), std::size_t{0});
  // Partial Fisher-Yates: the first k entries form the random subset.
  for (std::size_t i = 0; i < k; ++i) std::swap(chips[i], chips[i + rng.below(n - i)]);
  std::vector<std::size_t> exemplars(chips.begin(), chips.begin() + static_cast<std::ptrdiff_t>(k));

  std::vector<bool> is_exemplar(n, false);
  CategoryState st;
  st.eval = &eval;
  std::vector<double> nearest(n);

  auto reassign = [&] {
    std::fill(is_exemplar.begin(), is_exemplar.end(), false);
    for (std::size_t e : exemplars) is_exemplar[e] = true;
    st.assign.assign(n, 0);
    for (std::size_t t = 0; t < n; ++t) {
      int best = 0;
      double bd = dist(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(exemplars[0]));
      for (std::size_t s = 1; s < k; ++s) {
        const double d = dist(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(exemplars[s]));
        if (d < bd) {
          bd = d;
          best = static_cast<int>(s);
        }
      }
      st.assign[t] = best;
      nearest[t] = bd;
    }
    st.rebuild(k);
  };

  std::size_t step = 0;
  auto record = [&](const std::vector<std::size_t>& ex, std::size_t realized, const IBScores& sc, bool accepted) {
    TraceRecord r;
    r.exemplars = select_rows(x, ex);
    r.exemplar_chips = ex;
    r.k_realized = realized;
    r.step = step++;
    r.accepted = accepted;
    r.scores = sc;
    trace.records.push_back(std::move(r));
  };

  reassign();
  record(exemplars, st.realized(), scores_from(st.total, st.mass, info_mu), true);

  MoveScorer scorer(eval);
  std::vector<Move> moves;
  std::vector<std::size_t> fresh;
  std::vector<std::pair<int, double>> touched;
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double sign = direction == Direction::minimize ? 1.0 : -1.0;

  for (int sweep = 0; sweep < max_iters; ++sweep) {
    rng.shuffle(std::span<std::size_t>(order));
    bool swapped = false;
    for (std::size_t slot : order) {
      const int si = static_cast<int>(slot);
      double best_total = st.total;
      std::size_t best_chip = n;
      for (std::size_t j = 0; j < n; ++j) {
        if (is_exemplar[j]) continue;
        moves.clear();
        fresh.clear();
        const auto jj = static_cast<Eigen::Index>(j);
        for (std::size_t t = 0; t < n; ++t) {
          const auto tt = static_cast<Eigen::Index>(t);
          const int a = st.assign[t];
          const double dj = dist(tt, jj);
          int to = a;
          if (a == si) {
            // Cell of the replaced exemplar: nearest among the others and j.
            int best = si;
            double bd = dj;
            for (std::size_t s = 0; s < k; ++s) {
              if (s == slot) continue;
              const double d = dist(tt, static_cast<Eigen::Index>(exemplars[s]));
              if (d < bd || (d == bd && static_cast<int>(s) < best)) {
                bd = d;
                best = static_cast<int>(s);
              }
            }
            to = best;
          } else if (dj < nearest[t] || (dj == nearest[t] && si < a)) {
            to = si;
          }
          if (to == si) fresh.push_back(t);
          if (to != a) moves.push_back({a == si ? -1 : a, to == si ? -1 : to, t});
        }
        double fresh_mass = 0.0;
        touched.clear();
        const double total = scorer.rescore(st, moves, {si}, fresh, record_candidates ? &fresh_mass : nullptr,
                                            record_candidates ? &touched : nullptr);
        if (record_candidates) {
          std::vector<double> mass = st.mass;
          std::vector<int> counts = st.count;
          mass[slot] = fresh_mass;
          counts[slot] = static_cast<int>(fresh.size());
          for (const auto& [w, ms] : touched) mass[static_cast<std::size_t>(w)] = ms;
          for (const Move& mv : moves) {
            if (mv.from >= 0) --counts[static_cast<std::size_t>(mv.from)];
            if (mv.to >= 0) ++counts[static_cast<std::size_t>(mv.to)];
          }
          const auto realized =
              static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }));
          std::vector<std::size_t> ex = exemplars;
          ex[slot] = j;
          record(ex, realized, scores_from(total, mass, info_mu), false);
        }
        if (sign * (best_total - total) > kImprovement) {
          best_total = total;
          best_chip = j;
        }
      }
      if (best_chip < n) {
        exemplars[slot] = best_chip;
        reassign();
        record(exemplars, st.realized(), scores_from(st.total, st.mass, info_mu), true);
        swapped = true;
      }
    }
    if (!swapped) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Agglomerative merging

namespace {

class Merger {
 public:
  Merger(const Universe& universe, const MeaningModel& meanings)
      : x_(universe.coords()), eval_(meanings), scorer_(eval_), n_(universe.size()) {
    st_.eval = &eval_;
    centroids_ = x_;
    dc_ = pairwise_sq_distances(x_, centroids_);
    st_.assign.resize(n_);
    for (std::size_t t = 0; t < n_; ++t) st_.assign[t] = nearest_column(t, -1, -1);
    st_.rebuild(m());
    dnew_.resize(static_cast<Eigen::Index>(n_));
  }

  std::size_t m() const { return static_cast<std::size_t>(centroids_.rows()); }
  const Matrix& centroids() const { return centroids_; }
  const CategoryState& state() const { return st_; }

  struct Candidate {
    std::size_t realized = 0;
    double total = 0.0;  // nats, valid only when evaluated
  };

  // Realized count of merging (i, j), i < j, and its accuracy when
  // `score_if` equals that count.
  Candidate evaluate(std::size_t i, std::size_t j, std::size_t score_if) {
    const int ii = static_cast<int>(i);
    const int jj = static_cast<int>(j);
    const Eigen::RowVectorXd c = 0.5 * (centroids_.row(ii) + centroids_.row(jj));
    for (std::size_t t = 0; t < n_; ++t) dnew_(static_cast<Eigen::Index>(t)) = (x_.row(static_cast<Eigen::Index>(t)) - c).squaredNorm();

    moves_.clear();
    fresh_.clear();
    delta_touched_.clear();
    for (std::size_t t = 0; t < n_; ++t) {
      const auto tt = static_cast<Eigen::Index>(t);
      const int a = st_.assign[t];
      const double dn = dnew_(tt);
      int to;
      if (a == ii || a == jj) {
        to = nearest_column(t, ii, jj);
        if (to < 0 || dn < dc_(tt, to) || (dn == dc_(tt, to) && ii < to)) to = -1;
      } else {
        const double da = dc_(tt, a);
        to = (dn < da || (dn == da && ii < a)) ? -1 : a;
      }
      if (to == -1) fresh_.push_back(t);
      if (to != a) {
        moves_.push_back({(a == ii || a == jj) ? -1 : a, to, t});
        if (a != ii && a != jj) bump(a, -1);
        if (to >= 0) bump(to, +1);
      }
    }
    std::size_t realized = st_.realized();
    if (st_.count[i] > 0) --realized;
    if (st_.count[j] > 0) --realized;
    if (!fresh_.empty()) ++realized;
    for (int w : delta_touched_) {
      const auto wi = static_cast<std::size_t>(w);
      const bool before = st_.count[wi] > 0;
      const bool after = st_.count[wi] + delta_[wi] > 0;
      realized += static_cast<std::size_t>(after) - static_cast<std::size_t>(before);
      delta_[wi] = 0;
    }
    Candidate out;
    out.realized = realized;
    if (realized == score_if) out.total = scorer_.rescore(st_, moves_, {ii, jj}, fresh_);
    return out;
  }

  void apply(std::size_t i, std::size_t j) {
    const int ii = static_cast<int>(i);
    const int jj = static_cast<int>(j);
    evaluate(i, j, std::numeric_limits<std::size_t>::max());
    std::vector<int> assign = st_.assign;
    for (std::size_t t : fresh_) assign[t] = ii;
    for (const Move& mv : moves_)
      if (mv.to >= 0) assign[mv.t] = mv.to;
    // Drop centroid j; indices above it shift down.
    for (int& a : assign) {
      if (a > jj) --a;
    }
    const Eigen::RowVectorXd c = 0.5 * (centroids_.row(ii) + centroids_.row(jj));
    centroids_.row(ii) = c;
    dc_.col(ii) = dnew_;
    remove_row(centroids_, j);
    remove_col(dc_, j);
    st_.assign = std::move(assign);
    st_.rebuild(m());
  }

 private:
  // Nearest current centroid to referent t, skipping columns skip1/skip2;
  // ties to the lowest index. -1 when nothing is left.
  int nearest_column(std::size_t t, int skip1, int skip2) const {
    const auto tt = static_cast<Eigen::Index>(t);
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < dc_.cols(); ++c) {
      const int ci = static_cast<int>(c);
      if (ci == skip1 || ci == skip2) continue;
      if (dc_(tt, c) < bd) {
        bd = dc_(tt, c);
        best = ci;
      }
    }
    return best;
  }

  void bump(int w, int d) {
    const auto wi = static_cast<std::size_t>(w);
    if (delta_.size() < m()) delta_.assign(m(), 0);
    if (delta_[wi] == 0 && std::find(delta_touched_.begin(), delta_touched_.end(), w) == delta_touched_.end())
      delta_touched_.push_back(w);
    delta_[wi] += d;
  }

  static void remove_row(Matrix& a, std::size_t r) {
    const auto ri = static_cast<Eigen::Index>(r);
    const Eigen::Index tail = a.rows() - ri - 1;
    if (tail > 0) a.middleRows(ri, tail) = a.bottomRows(tail).eval();
    a.conservativeResize(a.rows() - 1, Eigen::NoChange);
  }
  static void remove_col(Matrix& a, std::size_t c) {
    const auto ci = static_cast<Eigen::Index>(c);
    const Eigen::Index tail = a.cols() - ci - 1;
    if (tail > 0) a.middleCols(ci, tail) = a.rightCols(tail).eval();
    a.conservativeResize(Eigen::NoChange, a.cols() - 1);
  }

  const Matrix& x_;
  HardAccuracy eval_;
  MoveScorer scorer_;
  std::size_t n_;
  Matrix centroids_;
  Matrix dc_;  // referent x centroid squared distances
  CategoryState st_;
  Eigen::VectorXd dnew_;
  std::vector<Move> moves_;
  std::vector<std::size_t> fresh_;
  std::vector<int> delta_;
  std::vector<int> delta_touched_;
};

}  // namespace

GeneratorTrace agglomerative_merge(const Universe& universe, const MeaningModel& meanings, std::size_t k_min) {
  check_dims(universe, meanings);
  if (k_min < 1) throw InvalidArgument("k_min must be at least 1");
  const double info_mu = meaning_information(meanings);

  GeneratorTrace trace;
  trace.algorithm = "agglomerative";
  trace.k_target = k_min;

  Merger merger(universe, meanings);
  std::size_t step = 0;
  auto record = [&] {
    TraceRecord r;
    r.exemplars = merger.centroids();
    r.k_realized = merger.state().realized();
    r.step = step++;
    r.scores = scores_from(merger.state().total, merger.state().mass, info_mu);
    trace.records.push_back(std::move(r));
  };
  record();

  while (merger.state().realized() > k_min && merger.m() > 1) {
    const std::size_t current = merger.state().realized();
    const std::size_t target = current - 1;
    const std::size_t m = merger.m();

    std::size_t bi = m, bj = m;
    double best = std::numeric_limits<double>::infinity();
    std::size_t fallback = 0;  // largest realized count below `current` seen
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const auto cand = merger.evaluate(i, j, target);
        if (cand.realized == target) {
          if (cand.total < best) {
            best = cand.total;
            bi = i;
            bj = j;
          }
        } else if (cand.realized < current && cand.realized > fallback) {
          fallback = cand.realized;
        }
      }
    }
    if (bi == m) {
      if (fallback == 0) {
        trace.warnings.push_back("no merge reduces the category count below " + std::to_string(current) +
                                 "; stopping");
        break;
      }
      trace.warnings.push_back("no merge realizes " + std::to_string(target) + " categories; continuing at " +
                               std::to_string(fallback));
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
          const auto cand = merger.evaluate(i, j, fallback);
          if (cand.realized == fallback && cand.total < best) {
            best = cand.total;
            bi = i;
            bj = j;
          }
        }
      }
    }
    merger.apply(bi, bj);
    record();
  }
  trace.converged = merger.state().realized() <= k_min;
  return trace;
}

// ---------------------------------------------------------------------------

std::vector<EvalRecord> pool_sample(const std::vector<GeneratorTrace>& traces, std::size_t k_min, std::size_t k_max,
                                    const Universe& universe, const MeaningModel& meanings, const Frontier& frontier,
                                    bool with_convexity) {
  check_dims(universe, meanings);
  if (k_min > k_max) throw InvalidArgument("empty k range");
  std::vector<EvalRecord> out;
  for (std::size_t ti = 0; ti < traces.size(); ++ti) {
    const auto& tr = traces[ti];
    for (std::size_t ri = 0; ri < tr.records.size(); ++ri) {
      const auto& r = tr.records[ri];
      if (r.k_realized < k_min || r.k_realized > k_max) continue;
      EvalRecord e;
      e.source = tr.algorithm;
      e.seed = tr.seed;
      e.k_target = tr.algorithm == "agglomerative" ? r.k_realized : tr.k_target;
      e.k = r.k_realized;
      e.step = r.step;
      e.complexity = r.scores.complexity;
      e.accuracy = r.scores.accuracy;
      e.cost = r.scores.cost;
      if (frontier.size() > 0) {
        const Deviation d = epsilon(e.complexity, e.accuracy, frontier);
        e.epsilon = d.epsilon;
        e.beta = d.beta;
      }
      if (with_convexity) e.convexity = system_consistency(voronoi_partition(r.exemplars, universe), universe);
      e.trace = ti;
      e.record = ri;
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace convexeff::gen
