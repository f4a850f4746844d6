#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "riskev/analysis.hpp"
#include "riskev/cli/synth.hpp"
#include "riskev/features.hpp"
#include "riskev/model.hpp"

namespace {

struct Fixture {
  riskev::features::TfidfModel tfidf;
  std::vector<riskev::features::SparseVector> rows;
  std::vector<int> labels;
};

Fixture make_fixture(std::size_t n) {
  const auto set = riskev::cli::separable_documents(n, 3);
  Fixture f{riskev::features::fit_tfidf(set.docs), {}, set.labels};
  f.rows = riskev::features::transform_all(f.tfidf, set.docs);
  return f;
}

void BM_LogRegFit(benchmark::State& state) {
  const auto f = make_fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(riskev::model::fit_logreg(f.rows, f.labels));
  state.counters["features"] = static_cast<double>(f.tfidf.size());
}
BENCHMARK(BM_LogRegFit)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Shap(benchmark::State& state) {
  const auto f = make_fixture(500);
  const auto m = riskev::model::fit_logreg(f.rows, f.labels);
  const auto base = riskev::model::compute_baseline(f.rows, f.tfidf.size());
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(riskev::model::shap_scores(m, f.rows[i], base, f.tfidf.terms()));
    i = (i + 1) % f.rows.size();
  }
}
BENCHMARK(BM_Shap);

void BM_PermutationTest(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<double> a(400), b(1200);
  for (auto& x : a) x = g(rng);
  for (auto& x : b) x = g(rng);
  const riskev::analysis::PermutationOptions opts{static_cast<std::size_t>(state.range(0)), 1,
                                                  static_cast<std::size_t>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(riskev::analysis::permutation_test(a, b, opts));
}
BENCHMARK(BM_PermutationTest)->Args({100000, 1})->Args({100000, 0})->Unit(benchmark::kMillisecond);

}  // namespace
