#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "riskev/cli/commands.hpp"
#include "riskev/cli/config.hpp"
#include "riskev/error.hpp"
#include "riskev/version.hpp"

namespace {

using namespace riskev;
using namespace riskev::cli;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kEndpoint = 3 };

// Flags override the configuration file, which overrides the defaults.
struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> output, corpus, unit, model_dir;
  bool no_title = false;

  std::optional<std::string> taskA_test, taskA_train, expert, subset;
  std::optional<std::size_t> folds;
  std::optional<double> C;

  std::optional<std::string> mode, highlight_mode, llm_endpoint, llm_model;
  std::optional<std::size_t> window_words, runs, max_words, concurrency, top_k;
  bool keep_duplicates = false;

  std::string gold, pred;
  std::optional<std::string> embedder, embed_endpoint, nli_endpoint;

  std::optional<std::size_t> permutations, k;
  bool label = false;
};

RunConfig build_config(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  apply_env_overrides(c);
  if (f.seed) c.seed = *f.seed;
  if (f.workers) c.workers = *f.workers;
  if (f.output) c.output_dir = *f.output;
  if (f.corpus) c.data.corpus = *f.corpus;
  if (f.unit) c.data.unit = parse_document_unit(*f.unit);
  if (f.model_dir) c.model.dir = *f.model_dir;
  if (f.no_title) c.data.include_title = false;
  if (f.taskA_test) c.data.taskA_test = *f.taskA_test;
  if (f.taskA_train) c.data.taskA_train = *f.taskA_train;
  if (f.expert) c.data.expert = *f.expert;
  if (f.subset) c.data.subset = parse_train_subset(*f.subset);
  if (f.folds) c.model.cv_folds = *f.folds;
  if (f.C) c.model.train.inverse_regularization = *f.C;
  if (f.top_k) c.model.top_k = *f.top_k;
  if (f.mode) c.mode = parse_evidence_mode(*f.mode);
  if (f.highlight_mode) {
    const auto m = evidence::parse_highlight_mode(*f.highlight_mode);
    if (!m) throw UsageError("--highlight-mode must be window or sentence");
    c.highlights.mode = *m;
  }
  if (f.window_words) c.highlights.window_words = *f.window_words;
  if (f.keep_duplicates) c.highlights.keep_duplicates = true;
  if (f.llm_endpoint) c.llm.endpoint = *f.llm_endpoint;
  if (f.llm_model) c.llm.model = *f.llm_model;
  if (f.runs) c.llm.n_runs = *f.runs;
  if (f.concurrency) c.llm.concurrency = *f.concurrency;
  if (f.max_words) c.summary.max_words = *f.max_words;
  if (f.embedder) c.eval.embedder = *f.embedder;
  if (f.embed_endpoint) c.eval.embed_endpoint = *f.embed_endpoint;
  if (f.nli_endpoint) c.eval.nli_endpoint = *f.nli_endpoint;
  if (f.permutations) c.analysis.n_permutations = *f.permutations;
  if (f.k) c.topics.k = *f.k;
  if (f.label) c.topics.label_with_llm = true;
  c.validate();
  return c;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void print_scores(const char* name, const eval::HighlightScores& s) {
  std::printf("%s recall %.3f  precision %.3f  recall_w %.3f  harmonic %.3f\n", name, s.recall, s.precision,
              s.weighted_recall, s.harmonic);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Suicide-risk evidence extraction: highlights, summaries and their evaluation"};
  app.set_version_flag("--version", std::string(riskev::version()));
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", f.config, "TOML configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "Random seed");
    sub->add_option("--workers", f.workers, "Worker threads (0 = all cores)");
    sub->add_option("-o,--output", f.output, "Output directory");
    sub->add_option("--corpus", f.corpus, "Corpus file (.jsonl or .csv)");
    sub->add_option("--unit", f.unit, "Document unit: post or user");
    sub->add_flag("--no-title", f.no_title, "Ignore post titles");
  };

  auto* train = app.add_subcommand("train", "Fit the tf-idf + logistic regression model and cross-validate it");
  common(train);
  train->add_option("--taskA-test", f.taskA_test, "Task A test split");
  train->add_option("--taskA-train", f.taskA_train, "Task A training split");
  train->add_option("--expert", f.expert, "Expert-annotated users");
  train->add_option("--subset", f.subset, "Training data: test, taskA or a_plus_e");
  train->add_option("--model-dir", f.model_dir, "Where to write the model files");
  train->add_option("--folds", f.folds, "Cross-validation folds");
  train->add_option("--C", f.C, "Inverse regularization strength");

  auto* evidence_cmd = app.add_subcommand("evidence", "Extract highlights and summaries for every user");
  common(evidence_cmd);
  evidence_cmd->add_option("--mode", f.mode, "goml, goml_plus_llm or llm");
  evidence_cmd->add_option("--model-dir", f.model_dir, "Model files written by train");
  evidence_cmd->add_option("--highlight-mode", f.highlight_mode, "window or sentence");
  evidence_cmd->add_option("--window-words", f.window_words, "Context window for window mode");
  evidence_cmd->add_option("--top-k", f.top_k, "Important features per post");
  evidence_cmd->add_flag("--keep-duplicates", f.keep_duplicates, "Keep highlights that are substrings of others");
  evidence_cmd->add_option("--llm-endpoint", f.llm_endpoint, "OpenAI-compatible server base URL");
  evidence_cmd->add_option("--llm-model", f.llm_model, "Model name sent to the server");
  evidence_cmd->add_option("--runs", f.runs, "LLM runs per post");
  evidence_cmd->add_option("--llm-concurrency", f.concurrency, "Requests in flight");
  evidence_cmd->add_option("--max-words", f.max_words, "Summary length limit");

  auto* evaluate = app.add_subcommand("evaluate", "Score predicted evidence against gold evidence");
  common(evaluate);
  evaluate->add_option("--gold", f.gold, "Directory with gold highlights.jsonl [summaries.jsonl]")->required();
  evaluate->add_option("--pred", f.pred, "Directory with predicted highlights.jsonl [summaries.jsonl]")->required();
  evaluate->add_option("--embedder", f.embedder, "test or http");
  evaluate->add_option("--embed-endpoint", f.embed_endpoint, "Embedding endpoint URL");
  evaluate->add_option("--nli-endpoint", f.nli_endpoint, "NLI endpoint URL");

  auto* analyze = app.add_subcommand("analyze", "Compare PoS and length of important vs other sentences");
  common(analyze);
  analyze->add_option("--pred", f.pred, "Directory with highlights.jsonl (sentence mode)")->required();
  analyze->add_option("--permutations", f.permutations, "Permutations per test");

  auto* topics = app.add_subcommand("topics", "Cluster documents and extract c-TF-IDF keywords");
  common(topics);
  topics->add_option("--k", f.k, "Number of clusters");
  topics->add_option("--embedder", f.embedder, "test or http");
  topics->add_option("--embed-endpoint", f.embed_endpoint, "Embedding endpoint URL");
  topics->add_flag("--label", f.label, "Ask the LLM for a short label per topic");
  topics->add_option("--llm-endpoint", f.llm_endpoint, "OpenAI-compatible server base URL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const auto config = build_config(f);
    if (train->parsed()) {
      const auto r = cmd_train(config);
      std::printf("trained on %zu documents, %zu features%s\n", r.n_docs, r.n_features,
                  r.converged ? "" : " (optimizer did not converge)");
      std::printf("%zu-fold CV: balanced accuracy %.3f  accuracy %.3f  F1 %.3f\n", r.cv.n_folds,
                  r.cv.mean.balanced_accuracy, r.cv.mean.accuracy, r.cv.mean.f1);
      std::printf("models written to %s\n", config.model.dir.string().c_str());
    } else if (evidence_cmd->parsed()) {
      const auto r = cmd_evidence(config);
      print_warnings(r.warnings);
      std::size_t n = 0;
      for (const auto& u : r.users) n += u.highlights.size();
      std::printf("%zu users, %zu highlights, %zu failures -> %s\n", r.users.size(), n, r.failures.size(),
                  config.output_dir.string().c_str());
    } else if (evaluate->parsed()) {
      const auto r = cmd_evaluate(config, f.gold, f.pred);
      print_warnings(r.warnings);
      if (r.mean_highlights) print_scores("highlights:", *r.mean_highlights);
      if (r.mean_summary) {
        std::printf("summaries: consistency %.3f  contradiction %.3f\n", r.mean_summary->consistency,
                    r.mean_summary->contradiction);
      }
    } else if (analyze->parsed()) {
      const auto rows = cmd_analyze(config, f.pred);
      analysis::write_comparison_csv(std::cout, rows);
    } else if (topics->parsed()) {
      for (const auto& t : cmd_topics(config)) {
        std::printf("topic %zu (%zu docs):", t.keywords.cluster_id, t.size);
        for (const auto& k : t.keywords.keywords) std::printf(" %s", k.term.c_str());
        if (t.label) std::printf("  [%s]", t.label->c_str());
        std::printf("\n");
      }
    }
    return kOk;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const EndpointError& e) {
    std::cerr << "endpoint error: " << e.what() << '\n';
    return kEndpoint;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
}
