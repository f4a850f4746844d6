#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "riskev/error.hpp"
#include "riskev/evidence.hpp"
#include "riskev/features.hpp"
#include "riskev/llm.hpp"
#include "riskev/model.hpp"
#include "riskev/summarize.hpp"

namespace riskev::cli {

namespace fs = std::filesystem;

/// Bad flags or configuration values (exit code 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Training data variants: the Task A test split alone, all of Task A, or
/// Task A plus the expert-annotated users.
enum class TrainSubset { test, taskA, a_plus_e };
std::string_view to_string(TrainSubset subset);
TrainSubset parse_train_subset(std::string_view value);

/// A document is one post, or all posts of a user joined by blank lines.
enum class DocumentUnit { post, user };
std::string_view to_string(DocumentUnit unit);
DocumentUnit parse_document_unit(std::string_view value);

enum class EvidenceMode { goml, goml_plus_llm, llm };
std::string_view to_string(EvidenceMode mode);
EvidenceMode parse_evidence_mode(std::string_view value);

struct DataConfig {
  /// Users to produce evidence for, analyze or cluster.
  fs::path corpus;
  fs::path taskA_test;
  fs::path taskA_train;
  fs::path expert;
  TrainSubset subset = TrainSubset::test;
  bool include_title = true;
  DocumentUnit unit = DocumentUnit::post;
};

struct ModelConfig {
  model::TrainConfig train;
  std::size_t cv_folds = 5;
  bool stratified = true;
  std::size_t top_k = 10;
  std::optional<double> min_score;
  bool require_present = true;
  /// Where train writes and evidence reads the model files.
  fs::path dir = "models";

  model::SelectionPolicy selection() const;
};

struct EvalConfig {
  /// "test" (built-in hashed trigram embedder) or "http".
  std::string embedder = "test";
  std::string embed_endpoint;
  std::string nli_endpoint;
  std::string api_key;
  std::size_t timeout_seconds = 120;
};

struct AnalysisConfig {
  std::size_t n_permutations = 100000;
  std::string tagger_fallback = "NOUN";
};

struct TopicsConfig {
  std::size_t k = 5;
  std::size_t top_k = 10;
  bool label_with_llm = false;
  std::size_t documents_per_label = 4;
};

struct RunConfig {
  DataConfig data;
  features::TfidfConfig tfidf;
  ModelConfig model;
  evidence::HighlightConfig highlights;
  summarize::SummaryConfig summary;
  llm::LlmParams llm;
  EvalConfig eval;
  AnalysisConfig analysis;
  TopicsConfig topics;
  EvidenceMode mode = EvidenceMode::goml;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  fs::path output_dir = "out";

  void validate() const;
};

/// Reads a TOML file over the defaults. Unknown keys are a UsageError.
RunConfig load_config(const fs::path& path);
RunConfig parse_config(std::string_view toml_text);

/// RISKEV_LLM_ENDPOINT, RISKEV_LLM_API_KEY, RISKEV_LLM_MODEL,
/// RISKEV_EMBED_ENDPOINT, RISKEV_NLI_ENDPOINT and RISKEV_EVAL_API_KEY.
void apply_env_overrides(RunConfig& config);

/// Canonical JSON of every setting that can change results. File paths,
/// endpoint URLs and secrets are left out.
std::string canonical_config_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

/// {"config_hash", "seed", "version"} as a JSON object string.
std::string provenance_json(const RunConfig& config);

}  // namespace riskev::cli
