#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "riskev/cli/synth.hpp"
#include "riskev/corpus.hpp"
#include "riskev/features.hpp"
#include "riskev/summarize.hpp"

namespace {

std::vector<std::string> post_texts(std::size_t users) {
  riskev::cli::SynthOptions opts;
  opts.users = users;
  opts.seed = 1;
  std::vector<std::string> out;
  for (const auto& u : riskev::cli::synthetic_corpus(opts).users) {
    for (const auto& p : u.posts) out.push_back(p.text(true));
  }
  return out;
}

void BM_Tokenize(benchmark::State& state) {
  const auto docs = post_texts(50);
  std::size_t bytes = 0;
  for (const auto& d : docs) bytes += d.size();
  for (auto _ : state) {
    for (const auto& d : docs) benchmark::DoNotOptimize(riskev::corpus::word_tokenize(d));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes));
}
BENCHMARK(BM_Tokenize);

void BM_SplitSentences(benchmark::State& state) {
  const auto docs = post_texts(50);
  for (auto _ : state) {
    for (const auto& d : docs) benchmark::DoNotOptimize(riskev::corpus::split_sentences(d));
  }
}
BENCHMARK(BM_SplitSentences);

void BM_TfidfFit(benchmark::State& state) {
  const auto docs = post_texts(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(riskev::features::fit_tfidf(docs));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * docs.size()));
}
BENCHMARK(BM_TfidfFit)->Arg(50)->Arg(250)->Unit(benchmark::kMillisecond);

void BM_TfidfTransform(benchmark::State& state) {
  const auto docs = post_texts(250);
  const auto model = riskev::features::fit_tfidf(docs);
  for (auto _ : state) benchmark::DoNotOptimize(riskev::features::transform_all(model, docs));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * docs.size()));
}
BENCHMARK(BM_TfidfTransform)->Unit(benchmark::kMillisecond);

void BM_TextRank(benchmark::State& state) {
  const auto docs = post_texts(200);
  std::vector<std::string> sentences;
  for (const auto& d : docs) {
    for (const auto& s : riskev::corpus::split_sentences(d)) {
      sentences.push_back(s.span.text);
      if (sentences.size() == static_cast<std::size_t>(state.range(0))) break;
    }
    if (sentences.size() == static_cast<std::size_t>(state.range(0))) break;
  }
  for (auto _ : state) benchmark::DoNotOptimize(riskev::summarize::textrank(sentences));
}
BENCHMARK(BM_TextRank)->Arg(10)->Arg(50)->Arg(200);

}  // namespace
