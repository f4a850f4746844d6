#include "riskev/cli/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <toml.hpp>

#include "riskev/hash.hpp"
#include "riskev/version.hpp"

namespace riskev::cli {

using json = nlohmann::json;

std::string_view to_string(TrainSubset subset) {
  switch (subset) {
    case TrainSubset::test: return "test";
    case TrainSubset::taskA: return "taskA";
    case TrainSubset::a_plus_e: return "a_plus_e";
  }
  return "test";
}

TrainSubset parse_train_subset(std::string_view value) {
  if (value == "test") return TrainSubset::test;
  if (value == "taskA") return TrainSubset::taskA;
  if (value == "a_plus_e") return TrainSubset::a_plus_e;
  throw UsageError("unknown train subset '" + std::string(value) + "' (expected test, taskA or a_plus_e)");
}

std::string_view to_string(DocumentUnit unit) { return unit == DocumentUnit::post ? "post" : "user"; }

DocumentUnit parse_document_unit(std::string_view value) {
  if (value == "post") return DocumentUnit::post;
  if (value == "user") return DocumentUnit::user;
  throw UsageError("unknown document unit '" + std::string(value) + "' (expected post or user)");
}

std::string_view to_string(EvidenceMode mode) {
  switch (mode) {
    case EvidenceMode::goml: return "goml";
    case EvidenceMode::goml_plus_llm: return "goml_plus_llm";
    case EvidenceMode::llm: return "llm";
  }
  return "goml";
}

EvidenceMode parse_evidence_mode(std::string_view value) {
  if (value == "goml") return EvidenceMode::goml;
  if (value == "goml_plus_llm") return EvidenceMode::goml_plus_llm;
  if (value == "llm") return EvidenceMode::llm;
  throw UsageError("unknown evidence mode '" + std::string(value) + "' (expected goml, goml_plus_llm or llm)");
}

model::SelectionPolicy ModelConfig::selection() const {
  model::SelectionPolicy policy;
  if (min_score) {
    policy.rule = model::MinScore{*min_score};
  } else {
    policy.rule = model::TopK{top_k};
  }
  policy.require_present = require_present;
  return policy;
}

void RunConfig::validate() const {
  try {
    tfidf.validate();
    model.train.validate();
    summary.validate();
    llm.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (model.cv_folds < 2) throw UsageError("model.cv_folds must be at least 2");
  if (model.top_k == 0) throw UsageError("model.top_k must be positive");
  if (eval.embedder != "test" && eval.embedder != "http") {
    throw UsageError("eval.embedder must be 'test' or 'http'");
  }
  if (analysis.n_permutations == 0) throw UsageError("analysis.n_permutations must be positive");
  if (topics.k < 2) throw UsageError("topics.k must be at least 2");
}

namespace {

// Reads typed keys from one TOML table and remembers which ones were used.
class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  template <typename T>
  void read(std::string_view key, T& out) {
    const auto* node = find(key);
    if (!node) return;
    if constexpr (std::is_same_v<T, bool>) {
      out = require(node->value<bool>(), key, "a boolean");
    } else if constexpr (std::is_same_v<T, double>) {
      out = require(node->value<double>(), key, "a number");
    } else if constexpr (std::is_integral_v<T>) {
      const auto v = require(node->value<std::int64_t>(), key, "an integer");
      if (v < 0) throw UsageError(qualified(key) + " must not be negative");
      out = static_cast<T>(v);
    } else {
      out = T(require(node->value<std::string>(), key, "a string"));
    }
  }

  template <typename T>
  void read(std::string_view key, std::optional<T>& out) {
    if (!find(key)) return;
    T value{};
    read(key, value);
    out = value;
  }

  template <typename Parse>
  void read_with(std::string_view key, Parse&& parse) {
    std::string value;
    if (find(key)) {
      read(key, value);
      parse(value);
    }
  }

  Section sub(std::string_view key) {
    const auto* node = find(key);
    if (!node) return Section(nullptr, qualified(key));
    if (!node->is_table()) throw UsageError(qualified(key) + " must be a table");
    return Section(node->as_table(), qualified(key));
  }

  void finish() const {
    if (!table_) return;
    for (const auto& [key, value] : *table_) {
      if (!used_.contains(std::string(key.str()))) {
        throw UsageError("unknown configuration key '" + qualified(key.str()) + "'");
      }
    }
  }

 private:
  const toml::node* find(std::string_view key) {
    if (!table_) return nullptr;
    used_.insert(std::string(key));
    return table_->get(key);
  }

  template <typename V>
  V require(std::optional<V> value, std::string_view key, std::string_view what) const {
    if (!value) throw UsageError(qualified(key) + " must be " + std::string(what));
    return *value;
  }

  std::string qualified(std::string_view key) const {
    return name_.empty() ? std::string(key) : name_ + "." + std::string(key);
  }

  const toml::table* table_;
  std::string name_;
  std::set<std::string> used_;
};

RunConfig from_table(const toml::table& root) {
  RunConfig c;
  Section top(&root, "");
  top.read("seed", c.seed);
  top.read("workers", c.workers);
  top.read("output_dir", c.output_dir);
  top.read_with("mode", [&](const std::string& v) { c.mode = parse_evidence_mode(v); });

  auto data = top.sub("data");
  data.read("corpus", c.data.corpus);
  data.read("taskA_test", c.data.taskA_test);
  data.read("taskA_train", c.data.taskA_train);
  data.read("expert", c.data.expert);
  data.read_with("subset", [&](const std::string& v) { c.data.subset = parse_train_subset(v); });
  data.read("include_title", c.data.include_title);
  data.read_with("unit", [&](const std::string& v) { c.data.unit = parse_document_unit(v); });
  data.finish();

  auto features = top.sub("features");
  features.read("ngram_min", c.tfidf.ngram_min);
  features.read("ngram_max", c.tfidf.ngram_max);
  features.read("min_df", c.tfidf.min_df);
  features.read("max_features", c.tfidf.max_features);
  features.read("strip_accents", c.tfidf.strip_accents);
  features.read("lowercase", c.tfidf.lowercase);
  features.read("smooth_idf", c.tfidf.smooth_idf);
  features.read("sublinear_tf", c.tfidf.sublinear_tf);
  features.read("l2_normalize", c.tfidf.l2_normalize);
  features.finish();

  auto model = top.sub("model");
  model.read("C", c.model.train.inverse_regularization);
  model.read("max_iterations", c.model.train.max_iterations);
  model.read("tolerance", c.model.train.gradient_tolerance);
  model.read("balanced", c.model.train.balanced);
  model.read("fit_intercept", c.model.train.fit_intercept);
  model.read("history", c.model.train.history);
  model.read("cv_folds", c.model.cv_folds);
  model.read("stratified", c.model.stratified);
  model.read("top_k", c.model.top_k);
  model.read("min_score", c.model.min_score);
  model.read("require_present", c.model.require_present);
  model.read("dir", c.model.dir);
  model.finish();

  auto hl = top.sub("highlights");
  hl.read_with("mode", [&](const std::string& v) {
    const auto m = evidence::parse_highlight_mode(v);
    if (!m) throw UsageError("highlights.mode must be 'window' or 'sentence'");
    c.highlights.mode = *m;
  });
  hl.read("window_words", c.highlights.window_words);
  hl.read("keep_duplicates", c.highlights.keep_duplicates);
  hl.read("merge_overlaps", c.highlights.merge_overlaps);
  hl.finish();

  auto summary = top.sub("summary");
  summary.read("max_words", c.summary.max_words);
  summary.read("n_sentences", c.summary.n_sentences);
  summary.read("damping", c.summary.damping);
  summary.read("convergence_eps", c.summary.convergence_eps);
  summary.read("max_iterations", c.summary.max_iterations);
  summary.finish();

  auto llm = top.sub("llm");
  llm.read("endpoint", c.llm.endpoint);
  llm.read("model", c.llm.model);
  llm.read("api_key", c.llm.api_key);
  llm.read("temperature", c.llm.temperature);
  llm.read("top_p", c.llm.top_p);
  llm.read("context_size", c.llm.context_size);
  llm.read("max_tokens", c.llm.max_tokens);
  llm.read("n_runs", c.llm.n_runs);
  std::optional<double> timeout;
  llm.read("timeout_seconds", timeout);
  if (timeout) c.llm.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(*timeout * 1000.0));
  llm.read("max_retries", c.llm.max_retries);
  std::optional<double> backoff;
  llm.read("initial_backoff_seconds", backoff);
  if (backoff) c.llm.initial_backoff = std::chrono::milliseconds(static_cast<std::int64_t>(*backoff * 1000.0));
  llm.read("concurrency", c.llm.concurrency);
  std::optional<std::string> audit;
  llm.read("audit_log", audit);
  if (audit) c.llm.audit_log = *audit;
  llm.read("highlight_prompt", c.llm.highlight_prompt);
  llm.read("summary_prompt", c.llm.summary_prompt);
  llm.finish();

  auto eval = top.sub("eval");
  eval.read("embedder", c.eval.embedder);
  eval.read("embed_endpoint", c.eval.embed_endpoint);
  eval.read("nli_endpoint", c.eval.nli_endpoint);
  eval.read("api_key", c.eval.api_key);
  eval.read("timeout_seconds", c.eval.timeout_seconds);
  eval.finish();

  auto analysis = top.sub("analysis");
  analysis.read("n_permutations", c.analysis.n_permutations);
  analysis.read("tagger_fallback", c.analysis.tagger_fallback);
  analysis.finish();

  auto topics = top.sub("topics");
  topics.read("k", c.topics.k);
  topics.read("top_k", c.topics.top_k);
  topics.read("label_with_llm", c.topics.label_with_llm);
  topics.read("documents_per_label", c.topics.documents_per_label);
  topics.finish();

  top.finish();
  return c;
}

}  // namespace

RunConfig parse_config(std::string_view toml_text) {
  try {
    return from_table(toml::parse(toml_text));
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "invalid configuration: " << e.description() << " at line " << e.source().begin.line;
    throw UsageError(msg.str());
  }
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read configuration file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const UsageError& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

void apply_env_overrides(RunConfig& config) {
  auto env = [](const char* name, std::string& target) {
    if (const char* v = std::getenv(name); v && *v) target = v;
  };
  env("RISKEV_LLM_ENDPOINT", config.llm.endpoint);
  env("RISKEV_LLM_API_KEY", config.llm.api_key);
  env("RISKEV_LLM_MODEL", config.llm.model);
  env("RISKEV_EMBED_ENDPOINT", config.eval.embed_endpoint);
  env("RISKEV_NLI_ENDPOINT", config.eval.nli_endpoint);
  env("RISKEV_EVAL_API_KEY", config.eval.api_key);
}

std::string canonical_config_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["mode"] = to_string(c.mode);
  j["data"] = {{"subset", to_string(c.data.subset)},
               {"include_title", c.data.include_title},
               {"unit", to_string(c.data.unit)}};
  j["features"] = {{"ngram_min", c.tfidf.ngram_min},
                   {"ngram_max", c.tfidf.ngram_max},
                   {"min_df", c.tfidf.min_df},
                   {"max_features", c.tfidf.max_features ? json(*c.tfidf.max_features) : json(nullptr)},
                   {"strip_accents", c.tfidf.strip_accents},
                   {"lowercase", c.tfidf.lowercase},
                   {"smooth_idf", c.tfidf.smooth_idf},
                   {"sublinear_tf", c.tfidf.sublinear_tf},
                   {"l2_normalize", c.tfidf.l2_normalize}};
  j["model"] = {{"C", c.model.train.inverse_regularization},
                {"max_iterations", c.model.train.max_iterations},
                {"tolerance", c.model.train.gradient_tolerance},
                {"balanced", c.model.train.balanced},
                {"fit_intercept", c.model.train.fit_intercept},
                {"history", c.model.train.history},
                {"cv_folds", c.model.cv_folds},
                {"stratified", c.model.stratified},
                {"top_k", c.model.top_k},
                {"min_score", c.model.min_score ? json(*c.model.min_score) : json(nullptr)},
                {"require_present", c.model.require_present}};
  j["highlights"] = {{"mode", evidence::to_string(c.highlights.mode)},
                     {"window_words", c.highlights.window_words},
                     {"keep_duplicates", c.highlights.keep_duplicates},
                     {"merge_overlaps", c.highlights.merge_overlaps}};
  j["summary"] = {{"max_words", c.summary.max_words},
                  {"n_sentences", c.summary.n_sentences},
                  {"damping", c.summary.damping},
                  {"convergence_eps", c.summary.convergence_eps},
                  {"max_iterations", c.summary.max_iterations}};
  j["llm"] = {{"model", c.llm.model},
              {"temperature", c.llm.temperature},
              {"top_p", c.llm.top_p},
              {"context_size", c.llm.context_size},
              {"max_tokens", c.llm.max_tokens},
              {"n_runs", c.llm.n_runs},
              {"highlight_prompt", c.llm.highlight_prompt},
              {"summary_prompt", c.llm.summary_prompt}};
  j["eval"] = {{"embedder", c.eval.embedder}};
  j["analysis"] = {{"n_permutations", c.analysis.n_permutations}, {"tagger_fallback", c.analysis.tagger_fallback}};
  j["topics"] = {{"k", c.topics.k}, {"top_k", c.topics.top_k}, {"label_with_llm", c.topics.label_with_llm},
                 {"documents_per_label", c.topics.documents_per_label}};
  return j.dump();  // object keys are sorted, so the text is canonical
}

std::string config_hash(const RunConfig& config) { return to_hex(fnv1a64(canonical_config_json(config))); }

std::string provenance_json(const RunConfig& config) {
  return json{{"config_hash", config_hash(config)}, {"seed", config.seed}, {"version", riskev::version()}}.dump();
}

}  // namespace riskev::cli
