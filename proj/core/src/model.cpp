#include "riskev/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>

#include <json.hpp>

#include "riskev/error.hpp"
#include "riskev/hash.hpp"
#include "riskev/random.hpp"

namespace riskev::model {

using json = nlohmann::json;

namespace {
constexpr int kFormatVersion = 1;

void check_labels(std::span<const int> labels) {
  for (int y : labels) {
    if (y != -1 && y != 1) throw DataError("labels must be -1 or +1, got " + std::to_string(y));
  }
}

// log(1 + exp(-m)) without overflow.
double log1p_exp_neg(double m) { return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::string fingerprint(std::span<const SparseVector> rows, std::span<const int> labels) {
  std::uint64_t h = fnv1a64("riskev.train");
  auto mix = [&h](std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    h = fnv1a64(std::string_view(bytes, 8), h);
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    mix(static_cast<std::uint64_t>(labels[i] + 1));
    mix(rows[i].entries.size());
    for (const auto& e : rows[i].entries) {
      mix(e.index);
      mix(std::bit_cast<std::uint64_t>(e.value));
    }
  }
  return to_hex(h);
}

}  // namespace

ClassWeights balanced_class_weights(std::span<const int> labels) {
  check_labels(labels);
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const auto negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw DataError("degenerate labels: both classes are required");
  const double n = static_cast<double>(labels.size());
  return ClassWeights{n / (2.0 * static_cast<double>(negatives)), n / (2.0 * static_cast<double>(positives))};
}

void TrainConfig::validate() const {
  if (!(inverse_regularization > 0.0)) throw DataError("logistic regression: C must be > 0");
  if (!(gradient_tolerance > 0.0)) throw DataError("logistic regression: tolerance must be > 0");
  if (history == 0) throw DataError("logistic regression: L-BFGS history must be >= 1");
}

Objective logistic_objective(std::span<const double> weights, double bias, std::span<const SparseVector> rows,
                             std::span<const int> labels, const ClassWeights& class_weights,
                             double inverse_regularization) {
  Objective out;
  out.weight_gradient.assign(weights.begin(), weights.end());
  double data_loss = 0.0, carry = 0.0;  // Kahan sum
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double y = labels[i];
    const double z = rows[i].dot(weights) + bias;
    const double cw = inverse_regularization * class_weights.for_label(labels[i]);
    const double term = cw * log1p_exp_neg(y * z) - carry;
    const double sum = data_loss + term;
    carry = (sum - data_loss) - term;
    data_loss = sum;
    const double coef = -cw * y * sigmoid(-y * z);
    for (const auto& e : rows[i].entries) out.weight_gradient[e.index] += coef * e.value;
    out.bias_gradient += coef;
  }
  out.value = data_loss + 0.5 * dot(weights, weights);
  return out;
}

LogRegModel fit_logreg(std::span<const SparseVector> rows, std::span<const int> labels, const TrainConfig& config) {
  config.validate();
  if (rows.size() != labels.size()) throw DataError("logistic regression: rows and labels differ in length");
  if (rows.size() < 2) throw DataError("logistic regression: at least two samples are required");
  const std::size_t dim = rows.front().dimension;
  for (const auto& r : rows) {
    if (r.dimension != dim) throw DataError("logistic regression: rows have inconsistent dimensions");
  }
  const ClassWeights cw = config.balanced ? balanced_class_weights(labels) : ClassWeights{};
  if (!config.balanced) {
    check_labels(labels);
    balanced_class_weights(labels);  // still requires both classes
  }

  // Parameter vector: weights followed by the bias.
  const std::size_t n_params = dim + 1;
  std::vector<double> x(n_params, 0.0);
  auto evaluate = [&](std::span<const double> params, std::vector<double>& grad) {
    auto obj = logistic_objective(params.first(dim), params[dim], rows, labels, cw, config.inverse_regularization);
    grad = std::move(obj.weight_gradient);
    grad.push_back(config.fit_intercept ? obj.bias_gradient : 0.0);
    return obj.value;
  };

  std::vector<double> g;
  double f = evaluate(x, g);
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> d(n_params), x_new(n_params), g_new;

  LogRegModel model;
  model.config = config;
  model.class_weights = cw;

  std::size_t iter = 0;
  double gnorm = std::sqrt(dot(g, g));
  while (gnorm > config.gradient_tolerance && iter < config.max_iterations) {
    // Two-loop recursion for d = -H g.
    d = g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * dot(s_hist[k], d);
      for (std::size_t i = 0; i < n_params; ++i) d[i] -= alpha[k] * y_hist[k][i];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) {
      gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
    } else {
      gamma = 1.0 / std::max(1.0, gnorm);
    }
    for (auto& v : d) v *= gamma;
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * dot(y_hist[k], d);
      for (std::size_t i = 0; i < n_params; ++i) d[i] += s_hist[k][i] * (alpha[k] - beta);
    }
    for (auto& v : d) v = -v;

    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < n_params; ++i) d[i] = -g[i] / std::max(1.0, gnorm);
      slope = dot(g, d);
    }

    // Backtracking on Armijo; steps meeting the approximate Wolfe conditions
    // are accepted too.
    double step = 1.0;
    double f_new = f;
    bool accepted = false;
    const double f_noise = 1e-10 * std::abs(f);
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t i = 0; i < n_params; ++i) x_new[i] = x[i] + step * d[i];
      f_new = evaluate(x_new, g_new);
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      const double slope_new = dot(g_new, d);
      if (f_new <= f + f_noise && slope_new >= 0.9 * slope && slope_new <= -0.8 * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (s_hist.empty()) break;  // steepest descent cannot make progress either
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      continue;
    }

    std::vector<double> s(n_params), yv(n_params);
    for (std::size_t i = 0; i < n_params; ++i) {
      s[i] = x_new[i] - x[i];
      yv[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, yv);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(yv, yv))) {
      if (s_hist.size() == config.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
    }
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    gnorm = std::sqrt(dot(g, g));
    ++iter;
  }

  model.weights.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(dim));
  model.bias = x[dim];
  model.iterations = iter;
  model.gradient_norm = gnorm;
  model.converged = gnorm <= config.gradient_tolerance;
  model.training_fingerprint = fingerprint(rows, labels);
  return model;
}

double decision_function(const LogRegModel& model, const SparseVector& x) {
  if (x.dimension != model.dimension()) {
    throw DataError("dimension mismatch: model has " + std::to_string(model.dimension()) + " features, vector has " +
                    std::to_string(x.dimension));
  }
  return x.dot(model.weights) + model.bias;
}

double predict_proba(const LogRegModel& model, const SparseVector& x) { return sigmoid(decision_function(model, x)); }

int predict(const LogRegModel& model, const SparseVector& x) { return predict_proba(model, x) >= 0.5 ? 1 : -1; }

ExplainerBaseline compute_baseline(std::span<const SparseVector> rows, std::size_t dimension) {
  ExplainerBaseline b;
  b.feature_means.assign(dimension, 0.0);
  if (rows.empty()) return b;
  for (const auto& r : rows) {
    if (r.dimension != dimension) throw DataError("baseline: row dimension mismatch");
    for (const auto& e : r.entries) b.feature_means[e.index] += e.value;
  }
  const double n = static_cast<double>(rows.size());
  for (auto& m : b.feature_means) m /= n;
  return b;
}

std::vector<FeatureScore> shap_scores(const LogRegModel& model, const SparseVector& x,
                                      const ExplainerBaseline& baseline, std::span<const std::string> feature_names) {
  const std::size_t dim = model.dimension();
  if (x.dimension != dim || baseline.feature_means.size() != dim) throw DataError("shap: dimension mismatch");
  if (!feature_names.empty() && feature_names.size() != dim) throw DataError("shap: feature name count mismatch");

  std::vector<FeatureScore> out;
  auto emit = [&](std::uint32_t i, double value) {
    const double mean = baseline.feature_means[i];
    if (value == mean) return;
    FeatureScore fs;
    fs.index = i;
    fs.value = value;
    fs.score = model.weights[i] * (value - mean);
    if (!feature_names.empty()) fs.ngram = feature_names[i];
    out.push_back(std::move(fs));
  };
  std::size_t k = 0;
  for (std::uint32_t i = 0; i < dim; ++i) {
    double value = 0.0;
    if (k < x.entries.size() && x.entries[k].index == i) value = x.entries[k++].value;
    emit(i, value);
  }
  std::sort(out.begin(), out.end(), [](const FeatureScore& a, const FeatureScore& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.ngram != b.ngram) return a.ngram < b.ngram;
    return a.index < b.index;
  });
  return out;
}

std::vector<FeatureScore> select_important(std::span<const FeatureScore> scores, const SelectionPolicy& policy) {
  std::vector<FeatureScore> eligible;
  for (const auto& s : scores) {
    if (!(s.score > 0.0)) continue;
    if (policy.require_present && !(s.value > 0.0)) continue;
    if (const auto* min = std::get_if<MinScore>(&policy.rule); min && s.score < min->threshold) continue;
    eligible.push_back(s);
  }
  std::stable_sort(eligible.begin(), eligible.end(), [](const FeatureScore& a, const FeatureScore& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.ngram != b.ngram) return a.ngram < b.ngram;
    return a.index < b.index;
  });
  if (const auto* top = std::get_if<TopK>(&policy.rule); top && eligible.size() > top->k) {
    eligible.resize(top->k);
  }
  return eligible;
}

FoldMetrics binary_metrics(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size() || truth.empty()) throw DataError("metrics: size mismatch or empty input");
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] > 0, p = predicted[i] > 0;
    if (t && p) ++tp;
    else if (!t && !p) ++tn;
    else if (p) ++fp;
    else ++fn;
  }
  const double n = static_cast<double>(truth.size());
  const double pos = static_cast<double>(tp + fn), neg = static_cast<double>(tn + fp);
  FoldMetrics m;
  m.n_test = truth.size();
  m.accuracy = static_cast<double>(tp + tn) / n;

  double recall_sum = 0.0;
  int classes = 0;
  if (pos > 0) recall_sum += static_cast<double>(tp) / pos, ++classes;
  if (neg > 0) recall_sum += static_cast<double>(tn) / neg, ++classes;
  m.balanced_accuracy = recall_sum / classes;

  auto f1 = [](std::size_t t_p, std::size_t f_p, std::size_t f_n) {
    const auto denom = 2 * t_p + f_p + f_n;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(t_p) / static_cast<double>(denom);
  };
  m.f1 = (pos * f1(tp, fp, fn) + neg * f1(tn, fn, fp)) / n;
  return m;
}

std::vector<std::size_t> assign_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed,
                                      bool stratified) {
  check_labels(labels);
  if (folds < 2) throw DataError("cross-validation: at least 2 folds are required");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order;
  if (stratified) {
    for (int cls : {-1, 1}) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == cls) members.push_back(i);
      }
      if (members.size() < folds) {
        throw DataError("cross-validation: class " + std::to_string(cls) + " has " + std::to_string(members.size()) +
                        " members, fewer than " + std::to_string(folds) + " folds");
      }
      fisher_yates(std::span<std::size_t>(members), rng);
      order.insert(order.end(), members.begin(), members.end());
    }
  } else {
    if (labels.size() < folds) throw DataError("cross-validation: fewer samples than folds");
    order.resize(labels.size());
    std::iota(order.begin(), order.end(), 0);
    fisher_yates(std::span<std::size_t>(order), rng);
  }
  std::vector<std::size_t> fold_of(labels.size());
  for (std::size_t k = 0; k < order.size(); ++k) fold_of[order[k]] = k % folds;
  return fold_of;
}

CvReport cross_validate(std::span<const std::string> docs, std::span<const int> labels,
                        const features::TfidfConfig& tfidf, const TrainConfig& train, std::size_t folds,
                        std::uint64_t seed, bool stratified) {
  if (docs.size() != labels.size()) throw DataError("cross-validation: docs and labels differ in length");
  const auto fold_of = assign_folds(labels, folds, seed, stratified);

  CvReport report;
  report.n_folds = folds;
  report.stratified = stratified;
  report.seed = seed;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::string> train_docs, test_docs;
    std::vector<int> train_y, test_y;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (fold_of[i] == f) {
        test_docs.push_back(docs[i]);
        test_y.push_back(labels[i]);
      } else {
        train_docs.push_back(docs[i]);
        train_y.push_back(labels[i]);
      }
    }
    const auto vectorizer = features::fit_tfidf(train_docs, tfidf);
    const auto x_train = features::transform_all(vectorizer, train_docs);
    const auto clf = fit_logreg(x_train, train_y, train);
    std::vector<int> predicted;
    for (const auto& d : test_docs) predicted.push_back(predict(clf, features::transform(vectorizer, d)));
    auto m = binary_metrics(test_y, predicted);
    m.n_train = train_docs.size();
    report.folds.push_back(m);
  }
  for (const auto& m : report.folds) {
    report.mean.balanced_accuracy += m.balanced_accuracy / static_cast<double>(folds);
    report.mean.accuracy += m.accuracy / static_cast<double>(folds);
    report.mean.f1 += m.f1 / static_cast<double>(folds);
    report.mean.n_train += m.n_train;
    report.mean.n_test += m.n_test;
  }
  report.mean.n_train /= folds;
  report.mean.n_test /= folds;
  return report;
}

namespace {

json sparse_json(std::span<const double> dense) {
  json indices = json::array(), values = json::array();
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      indices.push_back(i);
      values.push_back(dense[i]);
    }
  }
  return {{"dimension", dense.size()}, {"indices", indices}, {"values", values}};
}

std::vector<double> dense_from_json(const json& j) {
  std::vector<double> dense(j.at("dimension").get<std::size_t>(), 0.0);
  const auto indices = j.at("indices").get<std::vector<std::size_t>>();
  const auto values = j.at("values").get<std::vector<double>>();
  if (indices.size() != values.size()) throw DataError("sparse vector: indices and values differ in length");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= dense.size()) throw DataError("sparse vector: index out of range");
    if (!std::isfinite(values[k])) throw DataError("sparse vector: non-finite value");
    dense[indices[k]] = values[k];
  }
  return dense;
}

json parse_checked(std::string_view text, std::string_view format) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string(format) + ": " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != format) throw DataError("expected a " + std::string(format) + " document");
  if (j.value("format_version", 0) != kFormatVersion) throw DataError(std::string(format) + ": unsupported format_version");
  return j;
}

}  // namespace

std::string logreg_to_json(const LogRegModel& model) {
  const auto& c = model.config;
  json j = {{"format", "riskev.logreg"},
            {"format_version", kFormatVersion},
            {"weights", sparse_json(model.weights)},
            {"bias", model.bias},
            {"config",
             {{"C", c.inverse_regularization},
              {"max_iterations", c.max_iterations},
              {"gradient_tolerance", c.gradient_tolerance},
              {"class_weight", c.balanced ? "balanced" : "none"},
              {"fit_intercept", c.fit_intercept},
              {"history", c.history}}},
            {"class_weights", {{"negative", model.class_weights.negative}, {"positive", model.class_weights.positive}}},
            {"converged", model.converged},
            {"gradient_norm", model.gradient_norm},
            {"iterations", model.iterations},
            {"training_fingerprint", model.training_fingerprint}};
  return j.dump(1);
}

LogRegModel logreg_from_json(std::string_view text) {
  const json j = parse_checked(text, "riskev.logreg");
  try {
    LogRegModel m;
    m.weights = dense_from_json(j.at("weights"));
    m.bias = j.at("bias").get<double>();
    const auto& c = j.at("config");
    m.config.inverse_regularization = c.at("C").get<double>();
    m.config.max_iterations = c.at("max_iterations").get<std::size_t>();
    m.config.gradient_tolerance = c.at("gradient_tolerance").get<double>();
    m.config.balanced = c.at("class_weight").get<std::string>() == "balanced";
    m.config.fit_intercept = c.at("fit_intercept").get<bool>();
    m.config.history = c.at("history").get<std::size_t>();
    m.config.validate();
    m.class_weights.negative = j.at("class_weights").at("negative").get<double>();
    m.class_weights.positive = j.at("class_weights").at("positive").get<double>();
    m.converged = j.at("converged").get<bool>();
    m.gradient_norm = j.at("gradient_norm").get<double>();
    m.iterations = j.at("iterations").get<std::size_t>();
    m.training_fingerprint = j.at("training_fingerprint").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("riskev.logreg: ") + e.what());
  }
}

std::string baseline_to_json(const ExplainerBaseline& baseline) {
  json j = {{"format", "riskev.baseline"},
            {"format_version", kFormatVersion},
            {"feature_means", sparse_json(baseline.feature_means)}};
  return j.dump(1);
}

ExplainerBaseline baseline_from_json(std::string_view text) {
  const json j = parse_checked(text, "riskev.baseline");
  try {
    return ExplainerBaseline{dense_from_json(j.at("feature_means"))};
  } catch (const json::exception& e) {
    throw DataError(std::string("riskev.baseline: ") + e.what());
  }
}

}  // namespace riskev::model
