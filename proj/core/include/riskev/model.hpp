#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "riskev/features.hpp"

namespace riskev::model {

using features::SparseVector;

/// Per-class loss weights for labels in {-1, +1}.
struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;

  double for_label(int label) const noexcept { return label > 0 ? positive : negative; }
  friend bool operator==(const ClassWeights&, const ClassWeights&) = default;
};

/// n_samples / (2 * n_class). Throws DataError("degenerate labels") unless both
/// classes are present, and on labels other than -1/+1.
ClassWeights balanced_class_weights(std::span<const int> labels);

struct TrainConfig {
  /// C: the data term is multiplied by C, the penalty is 0.5 * ||w||^2.
  double inverse_regularization = 1.0;
  std::size_t max_iterations = 1000;
  /// Stop once the Euclidean norm of the full gradient (weights and bias) is below this.
  double gradient_tolerance = 1e-6;
  bool balanced = true;
  bool fit_intercept = true;
  /// L-BFGS memory.
  std::size_t history = 10;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct LogRegModel {
  std::vector<double> weights;
  double bias = 0.0;
  TrainConfig config;
  ClassWeights class_weights;
  bool converged = false;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  std::string training_fingerprint;

  std::size_t dimension() const noexcept { return weights.size(); }
};

/// Value and gradient of the class-weighted, L2-regularized logistic loss
///   C * sum_i c(y_i) * log(1 + exp(-y_i (w.x_i + b))) + 0.5 * ||w||^2
/// The intercept is not penalized.
struct Objective {
  double value = 0.0;
  std::vector<double> weight_gradient;
  double bias_gradient = 0.0;
};

Objective logistic_objective(std::span<const double> weights, double bias, std::span<const SparseVector> rows,
                             std::span<const int> labels, const ClassWeights& class_weights,
                             double inverse_regularization);

/// Deterministic L-BFGS with Armijo backtracking. A run that exhausts
/// max_iterations is returned with converged == false.
LogRegModel fit_logreg(std::span<const SparseVector> rows, std::span<const int> labels,
                       const TrainConfig& config = {});

double decision_function(const LogRegModel& model, const SparseVector& x);
/// sigma(w.x + b). Throws DataError on dimension mismatch.
double predict_proba(const LogRegModel& model, const SparseVector& x);
int predict(const LogRegModel& model, const SparseVector& x);

/// Feature means over the explanation corpus (the SHAP background).
struct ExplainerBaseline {
  std::vector<double> feature_means;
};

ExplainerBaseline compute_baseline(std::span<const SparseVector> rows, std::size_t dimension);

struct FeatureScore {
  std::uint32_t index = 0;
  std::string ngram;
  /// x_i for the explained document.
  double value = 0.0;
  /// w_i * (x_i - mean_i)
  double score = 0.0;
};

/// Linear SHAP values for every feature whose value differs from its mean,
/// ordered by (score desc, ngram asc, index asc). `feature_names`, when given,
/// fills FeatureScore::ngram.
std::vector<FeatureScore> shap_scores(const LogRegModel& model, const SparseVector& x,
                                      const ExplainerBaseline& baseline,
                                      std::span<const std::string> feature_names = {});

struct TopK {
  std::size_t k = 10;
};
struct MinScore {
  double threshold = 0.0;
};

/// Only scores pushing towards class +1 (score > 0) are eligible. With
/// `require_present`, features absent from the document are skipped, since
/// they cannot be aligned back to its text.
struct SelectionPolicy {
  std::variant<TopK, MinScore> rule = TopK{};
  bool require_present = true;
};

std::vector<FeatureScore> select_important(std::span<const FeatureScore> scores, const SelectionPolicy& policy = {});

struct FoldMetrics {
  double balanced_accuracy = 0.0;
  double accuracy = 0.0;
  /// Support-weighted F1 over both classes.
  double f1 = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

struct CvReport {
  std::vector<FoldMetrics> folds;
  FoldMetrics mean;
  std::size_t n_folds = 0;
  bool stratified = true;
  std::uint64_t seed = 0;
};

FoldMetrics binary_metrics(std::span<const int> truth, std::span<const int> predicted);

/// Fold id per sample. Stratified assignment shuffles each class with a seeded
/// generator and deals the concatenation round-robin, so fold sizes and
/// per-class counts differ by at most one.
std::vector<std::size_t> assign_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed,
                                      bool stratified = true);

/// Refits the vectorizer and the classifier on each training split.
CvReport cross_validate(std::span<const std::string> docs, std::span<const int> labels,
                        const features::TfidfConfig& tfidf, const TrainConfig& train, std::size_t folds = 5,
                        std::uint64_t seed = 0, bool stratified = true);

std::string logreg_to_json(const LogRegModel& model);
LogRegModel logreg_from_json(std::string_view text);
std::string baseline_to_json(const ExplainerBaseline& baseline);
ExplainerBaseline baseline_from_json(std::string_view text);

}  // namespace riskev::model
