#pragma once

// Discriminating attested systems from their hue rotations: paired feature
// differences, advantage rates, logistic regression, cross-validated ROC AUC
// and nested likelihood-ratio tests.

#include "convexeff/records.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace convexeff::stats {

enum class Feature { delta_epsilon, delta_convexity };
std::string to_string(Feature f);

struct PairExample {
  std::string language;
  int rotation = 0;
  double delta_epsilon = 0.0;  // eps(first) - eps(second) with the rotated system first in a positive example
  double delta_conv = 0.0;     // conv(second) - conv(first) likewise
  int label = 1;               // 1: the second system is the attested one
  double feature(Feature f) const { return f == Feature::delta_epsilon ? delta_epsilon : delta_conv; }
};

// One mirrored pair of examples per (language, rotation): the positive
// example carries dEps = eps(rotated) - eps(attested) and
// dConv = conv(attested) - conv(rotated); its mirror negates both features
// and flips the label. `records` must hold rotation 0 for every language
// that has rotations.
std::vector<PairExample> build_pairs(const std::vector<EvalRecord>& records);

struct AdvantageRates {
  double efficiency = 0.0;  // share of languages with dEps > 0 for every rotation
  double convexity = 0.0;   // same for dConv
  std::size_t languages = 0;
  std::vector<std::string> efficiency_winners;
  std::vector<std::string> convexity_winners;
};

// Uses the positive example of each pair.
AdvantageRates advantage_rates(const std::vector<PairExample>& pairs);

struct CurvePoint {
  int rotation = 0;
  Feature feature = Feature::delta_epsilon;
  double mean = 0.0;
  double p025 = 0.0;  // 2.5th percentile across languages
  double p975 = 0.0;  // 97.5th percentile across languages
  std::size_t n = 0;
};

// Per-rotation summaries of the positive-example features.
std::vector<CurvePoint> advantage_curves(const std::vector<PairExample>& pairs);

// Linear-interpolation percentile (q in [0, 1]) of unsorted values.
double percentile(std::vector<double> values, double q);

struct FitResult {
  std::vector<Feature> features;
  std::vector<double> coefficients;  // per z-scored feature
  double intercept = 0.0;
  double log_likelihood = 0.0;       // nats
  std::size_t n = 0;
  int iterations = 0;
  bool converged = false;
  bool separated = false;
  std::vector<double> means;  // training standardization
  std::vector<double> scales;

  // Linear predictor on raw (unstandardized) features.
  double decision(const PairExample& e) const;
};

struct FitOptions {
  double gradient_tolerance = 1e-8;  // on the mean log-likelihood gradient
  double ridge = 1e-8;
  int max_iterations = 100;
};

// Maximum-likelihood logistic regression by IRLS on z-scored features (mean
// and population standard deviation of the training set).
FitResult logistic_fit(const std::vector<PairExample>& examples, const std::vector<Feature>& features,
                       const FitOptions& options = {});

// Mann-Whitney AUC with midranks for ties. Throws when a class is absent.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct CvResult {
  double mean_auc = 0.0;
  std::vector<double> fold_auc;  // NaN for skipped folds
  std::vector<std::string> warnings;
};

// Folds group whole languages; languages are shuffled with `seed` and dealt
// round-robin.
CvResult cv_auc(const std::vector<PairExample>& examples, const std::vector<Feature>& features, int folds,
                std::uint64_t seed, const FitOptions& options = {});

struct LrtResult {
  double chi2 = 0.0;
  int df = 0;
  double p = 1.0;
};

// Throws InvalidArgument unless the reduced features are a subset of the
// full ones, both fits share n, and LL_reduced <= LL_full + 1e-6.
LrtResult likelihood_ratio_test(const FitResult& full, const FitResult& reduced);

struct NestedComparison {
  FitResult full;
  FitResult without_epsilon;
  FitResult without_convexity;
  LrtResult drop_epsilon;
  LrtResult drop_convexity;
};

NestedComparison nested_comparison(const std::vector<PairExample>& examples, const FitOptions& options = {});

}  // namespace convexeff::stats
