#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "riskev/cli/commands.hpp"
#include "riskev/cli/synth.hpp"

namespace fs = std::filesystem;

namespace {

// Train on 250 synthetic users, then highlights and extractive summaries for
// 125 more: the GOML pipeline end to end, file I/O included.
void BM_GomlPipeline(benchmark::State& state) {
  const fs::path dir = fs::temp_directory_path() / ("riskev_bench_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  riskev::cli::SynthOptions train;
  train.users = 250;
  train.seed = 1;
  riskev::corpus::save_jsonl(riskev::cli::synthetic_corpus(train), dir / "train.jsonl");
  riskev::cli::SynthOptions users;
  users.users = 125;
  users.seed = 2;
  riskev::corpus::save_jsonl(riskev::cli::synthetic_corpus(users), dir / "users.jsonl");

  riskev::cli::RunConfig config;
  config.data.taskA_test = dir / "train.jsonl";
  config.data.corpus = dir / "users.jsonl";
  config.model.dir = dir / "models";
  config.output_dir = dir / "out";
  config.workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    riskev::cli::cmd_train(config);
    benchmark::DoNotOptimize(riskev::cli::cmd_evidence(config));
  }
  fs::remove_all(dir);
}
BENCHMARK(BM_GomlPipeline)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
