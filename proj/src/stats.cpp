#include "convexeff/stats.hpp"

#include "convexeff/error.hpp"
#include "convexeff/rng.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <span>

namespace convexeff::stats {

std::string to_string(Feature f) { return f == Feature::delta_epsilon ? "delta_epsilon" : "delta_convexity"; }

std::vector<PairExample> build_pairs(const std::vector<EvalRecord>& records) {
  std::map<std::string, const EvalRecord*> attested;
  for (const auto& r : records)
    if (r.rotation == 0) {
      if (!attested.emplace(r.source, &r).second) throw InvalidArgument("duplicate attested record for " + r.source);
    }
  std::vector<PairExample> out;
  for (const auto& r : records) {
    if (r.rotation == 0) continue;
    const auto it = attested.find(r.source);
    if (it == attested.end()) throw InvalidArgument("rotation without attested record for " + r.source);
    const EvalRecord& a = *it->second;
    PairExample pos;
    pos.language = r.source;
    pos.rotation = r.rotation;
    pos.delta_epsilon = r.epsilon - a.epsilon;
    pos.delta_conv = a.convexity - r.convexity;
    pos.label = 1;
    PairExample neg = pos;
    neg.delta_epsilon = -pos.delta_epsilon;
    neg.delta_conv = -pos.delta_conv;
    neg.label = 0;
    out.push_back(pos);
    out.push_back(neg);
  }
  return out;
}

AdvantageRates advantage_rates(const std::vector<PairExample>& pairs) {
  std::map<std::string, std::pair<bool, bool>> wins;  // (efficiency, convexity)
  for (const auto& e : pairs) {
    if (e.label != 1) continue;
    auto [it, inserted] = wins.try_emplace(e.language, true, true);
    it->second.first = it->second.first && e.delta_epsilon > 0.0;
    it->second.second = it->second.second && e.delta_conv > 0.0;
  }
  AdvantageRates r;
  r.languages = wins.size();
  for (const auto& [lang, w] : wins) {
    if (w.first) r.efficiency_winners.push_back(lang);
    if (w.second) r.convexity_winners.push_back(lang);
  }
  if (r.languages > 0) {
    r.efficiency = static_cast<double>(r.efficiency_winners.size()) / static_cast<double>(r.languages);
    r.convexity = static_cast<double>(r.convexity_winners.size()) / static_cast<double>(r.languages);
  }
  return r;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("percentile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("percentile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<CurvePoint> advantage_curves(const std::vector<PairExample>& pairs) {
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_rotation;
  for (const auto& e : pairs) {
    if (e.label != 1) continue;
    auto& slot = by_rotation[e.rotation];
    slot.first.push_back(e.delta_epsilon);
    slot.second.push_back(e.delta_conv);
  }
  std::vector<CurvePoint> out;
  for (const auto& [rot, vals] : by_rotation) {
    for (Feature f : {Feature::delta_epsilon, Feature::delta_convexity}) {
      const auto& v = f == Feature::delta_epsilon ? vals.first : vals.second;
      CurvePoint c;
      c.rotation = rot;
      c.feature = f;
      c.n = v.size();
      c.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      c.p025 = percentile(v, 0.025);
      c.p975 = percentile(v, 0.975);
      out.push_back(c);
    }
  }
  return out;
}

double FitResult::decision(const PairExample& e) const {
  double z = intercept;
  for (std::size_t i = 0; i < features.size(); ++i) z += coefficients[i] * (e.feature(features[i]) - means[i]) / scales[i];
  return z;
}

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

FitResult logistic_fit(const std::vector<PairExample>& examples, const std::vector<Feature>& features,
                       const FitOptions& options) {
  const std::size_t n = examples.size();
  if (n < 2) throw InvalidArgument("logistic regression needs at least 2 examples");
  const std::size_t p = features.size();
  FitResult fit;
  fit.features = features;
  fit.n = n;
  fit.means.assign(p, 0.0);
  fit.scales.assign(p, 1.0);

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    x(static_cast<Eigen::Index>(i), 0) = 1.0;
    y(static_cast<Eigen::Index>(i)) = examples[i].label == 1 ? 1.0 : 0.0;
  }
  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0.0;
    for (const auto& e : examples) mean += e.feature(features[j]);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& e : examples) var += (e.feature(features[j]) - mean) * (e.feature(features[j]) - mean);
    var /= static_cast<double>(n);
    const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
    fit.means[j] = mean;
    fit.scales[j] = sd;
    for (std::size_t i = 0; i < n; ++i)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = (examples[i].feature(features[j]) - mean) / sd;
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p + 1));
  auto log_likelihood = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd eta = x * b;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y(i) * eta(i) - softplus(eta(i));
    return ll;
  };

  double ll = log_likelihood(beta);
  const auto nd = static_cast<double>(n);
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd mu(eta.size()), w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      mu(i) = sigmoid(eta(i));
      w(i) = mu(i) * (1.0 - mu(i));
    }
    const Eigen::VectorXd grad = x.transpose() * (y - mu);
    if (grad.norm() / nd < options.gradient_tolerance) {
      fit.converged = true;
      break;
    }
    Eigen::MatrixXd h = x.transpose() * w.asDiagonal() * x;
    h.diagonal().array() += options.ridge;
    Eigen::VectorXd step = h.ldlt().solve(grad);
    // Step halving keeps the likelihood nondecreasing.
    double next = log_likelihood(beta + step);
    int halvings = 0;
    while (!(next >= ll) && halvings < 30) {
      step *= 0.5;
      next = log_likelihood(beta + step);
      ++halvings;
    }
    beta += step;
    ll = next;
    fit.iterations = it + 1;
  }

  fit.intercept = beta(0);
  fit.coefficients.assign(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) fit.coefficients[j] = beta(static_cast<Eigen::Index>(j + 1));
  fit.log_likelihood = std::min(0.0, ll);
  // Under complete separation the gradient can vanish numerically while the
  // coefficients are still growing, so check the fitted signs directly.
  {
    const Eigen::VectorXd eta = x * beta;
    bool all_correct = true;
    for (Eigen::Index i = 0; i < eta.size() && all_correct; ++i)
      all_correct = (y(i) > 0.5) ? eta(i) > 0.0 : eta(i) < 0.0;
    fit.separated = all_correct;
  }
  return fit;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double pos = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (labels[i] == 1) {
      pos += 1.0;
      rank_sum += rank[i];
    }
  const double neg = static_cast<double>(n) - pos;
  if (pos == 0.0 || neg == 0.0) throw InvalidArgument("AUC needs both classes");
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

CvResult cv_auc(const std::vector<PairExample>& examples, const std::vector<Feature>& features, int folds,
                std::uint64_t seed, const FitOptions& options) {
  if (folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
  std::set<std::string> unique;
  for (const auto& e : examples) unique.insert(e.language);
  std::vector<std::string> langs(unique.begin(), unique.end());
  if (langs.size() < static_cast<std::size_t>(folds))
    throw InvalidArgument("fewer languages than folds");
  Rng rng(seed);
  rng.shuffle(std::span<std::string>(langs));
  std::map<std::string, int> fold_of;
  for (std::size_t i = 0; i < langs.size(); ++i) fold_of[langs[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));

  CvResult res;
  double sum = 0.0;
  int used = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<PairExample> train, test;
    for (const auto& e : examples) (fold_of[e.language] == f ? test : train).push_back(e);
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& e : test) labels.push_back(e.label);
    const bool both = std::count(labels.begin(), labels.end(), 1) > 0 && std::count(labels.begin(), labels.end(), 0) > 0;
    if (!both || train.size() < 2) {
      res.warnings.push_back("fold " + std::to_string(f) + " skipped: held-out set lacks a class");
      res.fold_auc.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const FitResult fit = logistic_fit(train, features, options);
    for (const auto& e : test) scores.push_back(fit.decision(e));
    const double auc = roc_auc(scores, labels);
    res.fold_auc.push_back(auc);
    sum += auc;
    ++used;
  }
  if (used == 0) throw InvalidArgument("every fold was skipped");
  res.mean_auc = sum / used;
  return res;
}

LrtResult likelihood_ratio_test(const FitResult& full, const FitResult& reduced) {
  for (Feature f : reduced.features)
    if (std::find(full.features.begin(), full.features.end(), f) == full.features.end())
      throw InvalidArgument("reduced model is not nested in the full model");
  if (full.n != reduced.n) throw InvalidArgument("models were fitted on different data");
  if (reduced.log_likelihood > full.log_likelihood + 1e-6)
    throw InvalidArgument("reduced model fits better than the full model; nesting violated");
  LrtResult r;
  r.df = static_cast<int>(full.features.size() - reduced.features.size());
  r.chi2 = std::max(0.0, 2.0 * (full.log_likelihood - reduced.log_likelihood));
  r.p = r.df == 0 ? 1.0 : boost::math::gamma_q(0.5 * r.df, 0.5 * r.chi2);
  return r;
}

NestedComparison nested_comparison(const std::vector<PairExample>& examples, const FitOptions& options) {
  NestedComparison c;
  c.full = logistic_fit(examples, {Feature::delta_epsilon, Feature::delta_convexity}, options);
  c.without_epsilon = logistic_fit(examples, {Feature::delta_convexity}, options);
  c.without_convexity = logistic_fit(examples, {Feature::delta_epsilon}, options);
  c.drop_epsilon = likelihood_ratio_test(c.full, c.without_epsilon);
  c.drop_convexity = likelihood_ratio_test(c.full, c.without_convexity);
  return c;
}

}  // namespace convexeff::stats
