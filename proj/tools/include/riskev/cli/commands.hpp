#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "riskev/analysis.hpp"
#include "riskev/cli/config.hpp"
#include "riskev/corpus.hpp"
#include "riskev/eval.hpp"
#include "riskev/evidence.hpp"
#include "riskev/features.hpp"
#include "riskev/llm.hpp"
#include "riskev/model.hpp"
#include "riskev/summarize.hpp"

namespace riskev::cli {

/// Documents and binary labels of the configured training subset.
struct TrainingSet {
  std::vector<std::string> docs;
  std::vector<int> labels;
};
TrainingSet training_set(const RunConfig& config);

struct TrainResult {
  model::CvReport cv;
  std::size_t n_docs = 0;
  std::size_t n_features = 0;
  bool converged = false;
};

/// Writes tfidf.json, logreg.json, baseline.json and cv_report.json to
/// config.model.dir.
TrainResult cmd_train(const RunConfig& config);

struct ModelBundle {
  features::TfidfModel tfidf;
  model::LogRegModel logreg;
  model::ExplainerBaseline baseline;
};
ModelBundle load_models(const fs::path& dir);

struct UserEvidence {
  std::string user_id;
  std::vector<evidence::Highlight> highlights;
  summarize::Summary summary;
  std::vector<std::string> warnings;
};

/// GOML highlights for every post plus the summary of the user's important
/// sentences: extractive for goml, abstractive through `chat` for
/// goml_plus_llm (which always uses sentence highlights).
UserEvidence goml_user_evidence(const corpus::UserRecord& user, const ModelBundle& models, const RunConfig& config,
                                llm::ChatModel* chat = nullptr);

/// LLM highlights for every post and an abstractive summary of all posts.
UserEvidence llm_user_evidence(const corpus::UserRecord& user, llm::ChatModel& chat, const RunConfig& config);

struct UserFailure {
  std::string user_id;
  std::string kind;  // "data", "endpoint" or "error"
  std::string message;
};

struct EvidenceResult {
  std::vector<UserEvidence> users;  // corpus order, failed users omitted
  std::vector<UserFailure> failures;
  std::vector<std::string> warnings;
};

/// Runs the configured mode over config.data.corpus with one work item per
/// user and writes highlights.jsonl, summaries.jsonl, errors.jsonl and
/// run.json to config.output_dir. A failing user is recorded and skipped;
/// if every user fails the first failure is rethrown. `chat` replaces the
/// HTTP client built from config.llm.
EvidenceResult cmd_evidence(const RunConfig& config, llm::ChatModel* chat = nullptr);

/// One JSONL record per highlight / summary.
std::string highlight_to_jsonl(const evidence::Highlight& h);
std::string summary_to_jsonl(const summarize::Summary& s);

/// Highlight records; only user_id and text are required, so gold files
/// without offsets load too.
std::vector<evidence::Highlight> read_highlights(const fs::path& path);
/// user_id -> summary text.
std::vector<std::pair<std::string, std::string>> read_summaries(const fs::path& path);

struct UserScores {
  std::string user_id;
  std::optional<eval::HighlightScores> highlights;
  std::optional<eval::SummaryScores> summary;
};

struct EvaluateResult {
  std::vector<UserScores> users;
  std::optional<eval::HighlightScores> mean_highlights;
  std::optional<eval::SummaryScores> mean_summary;
  std::vector<std::string> warnings;
};

/// Compares the evidence directories `gold_dir` and `pred_dir` (each holding
/// highlights.jsonl and optionally summaries.jsonl) and writes
/// evaluation.json to config.output_dir. The user sets of both sides must
/// match. Summaries are scored only when an NLI client is available.
EvaluateResult cmd_evaluate(const RunConfig& config, const fs::path& gold_dir, const fs::path& pred_dir,
                            eval::Embedder* embedder = nullptr, eval::NliClient* nli = nullptr);

/// Important-vs-other sentence comparison of config.data.corpus against the
/// highlights in `pred_dir`; writes analysis.csv and run.json.
std::vector<analysis::ComparisonRow> cmd_analyze(const RunConfig& config, const fs::path& pred_dir);

struct Topic {
  analysis::ClusterKeywords keywords;
  std::size_t size = 0;
  std::optional<std::string> label;
};

/// Clusters the corpus documents and writes topics.json.
std::vector<Topic> cmd_topics(const RunConfig& config, eval::Embedder* embedder = nullptr,
                              llm::ChatModel* chat = nullptr);

}  // namespace riskev::cli
