#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "riskev/cli/synth.hpp"
#include "riskev/error.hpp"
#include "riskev/model.hpp"

namespace riskev::model {
namespace {

using features::SparseEntry;
using features::SparseVector;

SparseVector dense_row(const std::vector<double>& values) {
  SparseVector v;
  v.dimension = values.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) v.entries.push_back({static_cast<std::uint32_t>(i), values[i]});
  }
  return v;
}

struct Problem {
  std::vector<SparseVector> rows;
  std::vector<int> labels;
  std::size_t dim = 0;
};

Problem random_problem(std::mt19937_64& rng, std::size_t n, std::size_t dim, double density) {
  std::uniform_real_distribution<double> value(-1.0, 1.0), coin(0.0, 1.0);
  Problem p;
  p.dim = dim;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(dim, 0.0);
    for (auto& xi : x) {
      if (coin(rng) < density) xi = value(rng);
    }
    p.rows.push_back(dense_row(x));
    p.labels.push_back(i % 3 == 0 ? -1 : 1);
  }
  return p;
}

TEST(BalancedWeights, Examples) {
  std::vector<int> y(10, 1);
  y[0] = y[1] = -1;
  const auto w = balanced_class_weights(y);
  EXPECT_DOUBLE_EQ(w.positive, 0.625);
  EXPECT_DOUBLE_EQ(w.negative, 2.5);
  EXPECT_DOUBLE_EQ(w.positive * 8 + w.negative * 2, 10.0);

  const std::vector<int> even{1, 1, 1, 1, 1, -1, -1, -1, -1, -1};
  EXPECT_EQ(balanced_class_weights(even), (ClassWeights{1.0, 1.0}));
  EXPECT_THROW(balanced_class_weights(std::vector<int>(10, 1)), DataError);
  EXPECT_THROW(balanced_class_weights(std::vector<int>{1, 0, -1}), DataError);
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 25; ++trial) {
    const auto p = random_problem(rng, 12, 6, 0.6);
    const auto cw = balanced_class_weights(p.labels);
    const double C = 0.5 + trial * 0.1;
    std::vector<double> point(p.dim + 1);
    for (auto& v : point) v = normal(rng);
    auto f = [&](std::span<const double> z) {
      return logistic_objective(z.first(p.dim), z[p.dim], p.rows, p.labels, cw, C).value;
    };
    const auto fd = testing::finite_difference_gradient(f, point, 1e-5);
    const auto obj = logistic_objective(std::span<const double>(point).first(p.dim), point[p.dim], p.rows, p.labels,
                                        cw, C);
    for (std::size_t i = 0; i < p.dim; ++i) EXPECT_NEAR(obj.weight_gradient[i], fd[i], 1e-5);
    EXPECT_NEAR(obj.bias_gradient, fd[p.dim], 1e-5);
  }
}

TEST(FitLogreg, SeparableToySetIsFitExactly) {
  const std::vector<SparseVector> rows{dense_row({1.0, 0.0}), dense_row({0.9, 0.1}), dense_row({0.8, 0.0}),
                                       dense_row({0.0, 1.0}), dense_row({0.1, 0.9}), dense_row({0.0, 0.7})};
  const std::vector<int> y{1, 1, 1, -1, -1, -1};
  const auto m = fit_logreg(rows, y);
  EXPECT_TRUE(m.converged);
  EXPECT_LE(m.gradient_norm, m.config.gradient_tolerance);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(predict(m, rows[i]), y[i]);
  const auto cw = balanced_class_weights(y);
  const std::vector<double> zero(2, 0.0);
  EXPECT_LE(logistic_objective(m.weights, m.bias, rows, y, cw, 1.0).value,
            logistic_objective(zero, 0.0, rows, y, cw, 1.0).value);
}

TEST(FitLogreg, OptimumHasVanishingGradient) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_problem(rng, 40, 8, 0.5);
    TrainConfig cfg;
    cfg.inverse_regularization = 2.0;
    const auto m = fit_logreg(p.rows, p.labels, cfg);
    ASSERT_TRUE(m.converged);
    const auto cw = balanced_class_weights(p.labels);
    std::vector<double> point = m.weights;
    point.push_back(m.bias);
    auto f = [&](std::span<const double> z) {
      return logistic_objective(z.first(p.dim), z[p.dim], p.rows, p.labels, cw, 2.0).value;
    };
    const auto fd = testing::finite_difference_gradient(f, point, 1e-5);
    double norm = 0.0;
    for (double g : fd) {
      EXPECT_LE(std::abs(g), 1e-5);
      norm += g * g;
    }
    EXPECT_LE(m.gradient_norm, cfg.gradient_tolerance);
  }
}

TEST(FitLogreg, ReportsNonConvergence) {
  std::mt19937_64 rng(1);
  const auto p = random_problem(rng, 30, 5, 0.8);
  TrainConfig cfg;
  cfg.max_iterations = 1;
  const auto m = fit_logreg(p.rows, p.labels, cfg);
  EXPECT_FALSE(m.converged);
  EXPECT_GT(m.gradient_norm, cfg.gradient_tolerance);
}

TEST(FitLogreg, IsDeterministic) {
  std::mt19937_64 rng(2);
  const auto p = random_problem(rng, 30, 5, 0.8);
  const auto a = fit_logreg(p.rows, p.labels);
  const auto b = fit_logreg(p.rows, p.labels);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
  EXPECT_EQ(a.training_fingerprint, b.training_fingerprint);
  EXPECT_EQ(logreg_to_json(a), logreg_to_json(b));
}

TEST(FitLogreg, ConvergesOnRealisticTfidfProblems) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    cli::SynthOptions opts;
    opts.users = 200 + 10 * seed;
    opts.seed = seed;
    std::vector<std::string> docs;
    std::vector<int> labels;
    for (const auto& u : cli::synthetic_corpus(opts).users) {
      for (const auto& p : u.posts) {
        docs.push_back(p.text(true));
        labels.push_back(corpus::map_risk_to_binary(u.label));
      }
    }
    const auto tfidf = features::fit_tfidf(docs);
    const auto rows = features::transform_all(tfidf, docs);
    for (double C : {1.0, 100.0}) {
      TrainConfig cfg;
      cfg.inverse_regularization = C;
      const auto m = fit_logreg(rows, labels, cfg);
      EXPECT_TRUE(m.converged) << "seed " << seed << " C " << C << " gradient norm " << m.gradient_norm;
      EXPECT_LT(m.iterations, 500u);
    }
  }
}

TEST(PredictProba, SigmoidProperties) {
  LogRegModel m;
  m.weights = {0.0, 0.0};
  const auto x = dense_row({0.3, -0.2});
  EXPECT_DOUBLE_EQ(predict_proba(m, x), 0.5);

  m.weights = {1.5, -0.5};
  m.bias = 0.25;
  LogRegModel neg = m;
  neg.weights = {-1.5, 0.5};
  neg.bias = -0.25;
  EXPECT_NEAR(predict_proba(m, x), 1.0 - predict_proba(neg, x), 1e-15);

  double previous = 0.0;
  for (double t = -5; t <= 5; t += 0.5) {
    const double p = predict_proba(m, dense_row({t, 0.0}));
    EXPECT_GT(p, previous);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
    previous = p;
  }
  EXPECT_THROW(predict_proba(m, dense_row({1.0, 2.0, 3.0})), DataError);
}

TEST(Shap, DirectSubstitution) {
  LogRegModel m;
  m.weights = {0.5, 2.0, -1.0};
  ExplainerBaseline base{{0.1, 0.3, 0.0}};
  const auto x = dense_row({0.2, 0.3, 0.4});
  const std::vector<std::string> names{"f0", "f1", "f2"};
  const auto s = shap_scores(m, x, base, names);
  ASSERT_EQ(s.size(), 2u);  // f1 sits exactly at its mean
  EXPECT_EQ(s[0].ngram, "f0");
  EXPECT_NEAR(s[0].score, 0.05, 1e-15);
  EXPECT_EQ(s[1].ngram, "f2");
  EXPECT_NEAR(s[1].score, -0.4, 1e-15);
  EXPECT_DOUBLE_EQ(s[0].value, 0.2);
}

TEST(Shap, AdditivityAndShapleyOracle) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 1 + trial % 8;
    LogRegModel m;
    for (std::size_t i = 0; i < dim; ++i) m.weights.push_back(normal(rng));
    m.bias = normal(rng);
    std::vector<std::vector<double>> background;
    std::vector<SparseVector> rows;
    for (int b = 0; b < 7; ++b) {
      std::vector<double> r(dim);
      for (auto& v : r) v = unit(rng) < 0.3 ? 0.0 : unit(rng);
      background.push_back(r);
      rows.push_back(dense_row(r));
    }
    const auto base = compute_baseline(rows, dim);
    std::vector<double> xv(dim);
    for (auto& v : xv) v = unit(rng) < 0.3 ? 0.0 : unit(rng);
    const auto x = dense_row(xv);
    const auto scores = shap_scores(m, x, base);

    std::vector<double> phi(dim, 0.0);
    for (const auto& s : scores) phi[s.index] = s.score;
    auto f = [&](std::span<const double> z) {
      return std::inner_product(z.begin(), z.end(), m.weights.begin(), m.bias);
    };
    const auto exact = testing::exact_shapley(f, xv, background);
    for (std::size_t i = 0; i < dim; ++i) EXPECT_NEAR(phi[i], exact[i], 1e-9);

    const double total = std::accumulate(phi.begin(), phi.end(), 0.0);
    const double expected = f(xv) - f(base.feature_means);
    EXPECT_NEAR(total, expected, 1e-9);
  }
}

TEST(Shap, ColumnScalingInvariance) {
  LogRegModel m;
  m.weights = {0.8, -1.2};
  const auto s1 = shap_scores(m, dense_row({0.4, 0.1}), ExplainerBaseline{{0.1, 0.3}});
  LogRegModel scaled;
  scaled.weights = {0.8 / 4.0, -1.2};
  const auto s2 = shap_scores(scaled, dense_row({1.6, 0.1}), ExplainerBaseline{{0.4, 0.3}});
  ASSERT_EQ(s1.size(), s2.size());
  for (std::size_t i = 0; i < s1.size(); ++i) EXPECT_NEAR(s1[i].score, s2[i].score, 1e-15);
}

std::vector<FeatureScore> scores_of(std::vector<std::pair<std::string, double>> items) {
  std::vector<FeatureScore> out;
  std::uint32_t i = 0;
  for (auto& [name, score] : items) out.push_back({i++, name, 0.5, score});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.score != b.score ? a.score > b.score : a.ngram < b.ngram;
  });
  return out;
}

TEST(SelectImportant, PolicyRules) {
  EXPECT_TRUE(select_important(scores_of({{"a b", -0.1}, {"c d", 0.0}})).empty());

  const auto s = scores_of({{"z z", 0.3}, {"a a", 0.3}, {"m m", 0.5}, {"neg", -0.2}});
  const auto all = select_important(s, {TopK{100}, true});
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].ngram, "m m");
  EXPECT_EQ(all[1].ngram, "a a");  // tie on 0.3 broken lexicographically
  EXPECT_EQ(all[2].ngram, "z z");

  const auto two = select_important(s, {TopK{2}, true});
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[1].ngram, "a a");

  const auto above = select_important(s, {MinScore{0.4}, true});
  ASSERT_EQ(above.size(), 1u);
  EXPECT_EQ(above[0].ngram, "m m");

  auto absent = s;
  absent[0].value = 0.0;  // "m m" not in the document
  EXPECT_EQ(select_important(absent, {TopK{1}, true})[0].ngram, "a a");
  EXPECT_EQ(select_important(absent, {TopK{1}, false})[0].ngram, "m m");
}

TEST(Metrics, ConstantPredictorAndWeightedF1) {
  // 82% positive, predicting the majority: balanced accuracy .5, accuracy .82,
  // support-weighted F1 ~ .74.
  std::vector<int> truth(100, 1);
  std::fill(truth.begin(), truth.begin() + 18, -1);
  const std::vector<int> constant(100, 1);
  const auto m = binary_metrics(truth, constant);
  EXPECT_DOUBLE_EQ(m.balanced_accuracy, 0.5);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.82);
  EXPECT_NEAR(m.f1, 0.82 * (2 * 0.82 / 1.82), 1e-12);
  EXPECT_NEAR(m.f1, 0.74, 0.005);

  std::fill(truth.begin(), truth.end(), 1);
  std::fill(truth.begin(), truth.begin() + 14, -1);
  EXPECT_NEAR(binary_metrics(truth, constant).f1, 0.80, 0.006);

  const std::vector<int> t2{1, 1, -1, -1}, p2{1, -1, -1, -1};
  const auto m2 = binary_metrics(t2, p2);
  EXPECT_DOUBLE_EQ(m2.accuracy, 0.75);
  EXPECT_DOUBLE_EQ(m2.balanced_accuracy, 0.75);
  // F1(+) = 2/3, F1(-) = 0.8, equal support.
  EXPECT_NEAR(m2.f1, (2.0 / 3.0 + 0.8) / 2.0, 1e-12);
}

TEST(Folds, StratifiedPartitionProperties) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t folds = 2 + trial % 6;
    const std::size_t n_pos = folds + rng() % 40, n_neg = folds + rng() % 40;
    std::vector<int> labels(n_pos, 1);
    labels.insert(labels.end(), n_neg, -1);
    std::shuffle(labels.begin(), labels.end(), rng);
    const auto ids = assign_folds(labels, folds, trial, true);
    std::vector<std::size_t> size(folds, 0), pos(folds, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      ASSERT_LT(ids[i], folds);
      ++size[ids[i]];
      if (labels[i] > 0) ++pos[ids[i]];
    }
    const auto [smin, smax] = std::minmax_element(size.begin(), size.end());
    const auto [pmin, pmax] = std::minmax_element(pos.begin(), pos.end());
    EXPECT_LE(*smax - *smin, 1u);
    EXPECT_LE(*pmax - *pmin, 1u);
    EXPECT_EQ(assign_folds(labels, folds, trial, true), ids);
  }
  EXPECT_THROW(assign_folds(std::vector<int>{1, 1, 1, -1}, 2, 0, true), DataError);
}

TEST(CrossValidate, SeparableCorpusIsLearned) {
  const auto set = cli::separable_documents(200, 3);
  const auto report = cross_validate(set.docs, set.labels, {}, {}, 5, 3, true);
  ASSERT_EQ(report.folds.size(), 5u);
  EXPECT_GE(report.mean.accuracy, 0.95);
  std::size_t total = 0;
  for (const auto& f : report.folds) {
    total += f.n_test;
    EXPECT_EQ(f.n_test + f.n_train, 200u);
  }
  EXPECT_EQ(total, 200u);
  const auto again = cross_validate(set.docs, set.labels, {}, {}, 5, 3, true);
  EXPECT_EQ(again.mean.accuracy, report.mean.accuracy);
}

TEST(Serialization, RoundTrips) {
  std::mt19937_64 rng(6);
  const auto p = random_problem(rng, 20, 6, 0.5);
  const auto m = fit_logreg(p.rows, p.labels);
  const auto back = logreg_from_json(logreg_to_json(m));
  EXPECT_EQ(back.weights, m.weights);
  EXPECT_EQ(back.bias, m.bias);
  EXPECT_EQ(back.config, m.config);
  EXPECT_EQ(back.training_fingerprint, m.training_fingerprint);
  EXPECT_EQ(back.converged, m.converged);

  const auto base = compute_baseline(p.rows, p.dim);
  EXPECT_EQ(baseline_from_json(baseline_to_json(base)).feature_means, base.feature_means);
  EXPECT_THROW(logreg_from_json(baseline_to_json(base)), DataError);
}

}  // namespace
}  // namespace riskev::model
