#include "riskev/cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <json.hpp>

#include "riskev/error.hpp"
#include "riskev/hash.hpp"
#include "riskev/parallel.hpp"
#include "riskev/text.hpp"

namespace riskev::cli {

using json = nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Writes through a temporary file so a failed run never leaves a truncated artifact.
void write_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw DataError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("cannot write " + path.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw DataError("cannot write " + path.string() + ": " + ec.message());
}

json provenance(const RunConfig& config) { return json::parse(provenance_json(config)); }

// Adds provenance to an artifact produced by the core serializers.
std::string with_provenance(const std::string& artifact, const RunConfig& config) {
  auto j = json::parse(artifact);
  j["provenance"] = provenance(config);
  return j.dump(1) + "\n";
}

std::size_t workers_for(const RunConfig& config) {
  return config.workers == 0 ? default_workers() : config.workers;
}

std::string document_text(const corpus::UserRecord& user, bool include_title) {
  std::string text;
  for (const auto& post : user.posts) {
    if (!text.empty()) text += "\n\n";
    text += post.text(include_title);
  }
  return text;
}

corpus::Corpus require_corpus(const RunConfig& config) {
  if (config.data.corpus.empty()) throw UsageError("no corpus given (data.corpus / --corpus)");
  return corpus::load_corpus(config.data.corpus);
}

std::unique_ptr<eval::Embedder> make_embedder(const RunConfig& config) {
  if (config.eval.embedder == "test") return std::make_unique<eval::HashedTrigramEmbedder>();
  if (config.eval.embed_endpoint.empty()) throw UsageError("eval.embedder = 'http' needs eval.embed_endpoint");
  eval::HttpEndpoint endpoint{config.eval.embed_endpoint, config.eval.api_key,
                              std::chrono::seconds(config.eval.timeout_seconds), 2};
  return std::make_unique<eval::HttpEmbedder>(endpoint);
}

}  // namespace

TrainingSet training_set(const RunConfig& config) {
  std::vector<std::pair<const char*, fs::path>> sources{{"data.taskA_test", config.data.taskA_test}};
  if (config.data.subset != TrainSubset::test) sources.emplace_back("data.taskA_train", config.data.taskA_train);
  if (config.data.subset == TrainSubset::a_plus_e) sources.emplace_back("data.expert", config.data.expert);

  TrainingSet set;
  for (const auto& [key, path] : sources) {
    if (path.empty()) {
      throw UsageError(std::string(key) + " is required for train subset '" +
                       std::string(to_string(config.data.subset)) + "'");
    }
    const auto corpus = corpus::load_corpus(path);
    for (const auto& user : corpus.users) {
      const int label = corpus::map_risk_to_binary(user.label);
      if (config.data.unit == DocumentUnit::user) {
        set.docs.push_back(document_text(user, config.data.include_title));
        set.labels.push_back(label);
        continue;
      }
      for (const auto& post : user.posts) {
        set.docs.push_back(post.text(config.data.include_title));
        set.labels.push_back(label);
      }
    }
  }
  if (set.docs.empty()) {
    throw DataError("train subset '" + std::string(to_string(config.data.subset)) + "' selects no documents");
  }
  return set;
}

TrainResult cmd_train(const RunConfig& config) {
  config.validate();
  const auto set = training_set(config);

  TrainResult result;
  result.n_docs = set.docs.size();
  result.cv = model::cross_validate(set.docs, set.labels, config.tfidf, config.model.train, config.model.cv_folds,
                                    config.seed, config.model.stratified);

  const auto tfidf = features::fit_tfidf(set.docs, config.tfidf);
  const auto rows = features::transform_all(tfidf, set.docs);
  const auto logreg = model::fit_logreg(rows, set.labels, config.model.train);
  const auto baseline = model::compute_baseline(rows, tfidf.size());
  result.n_features = tfidf.size();
  result.converged = logreg.converged;

  auto fold_json = [](const model::FoldMetrics& m) {
    return json{{"balanced_accuracy", m.balanced_accuracy},
                {"accuracy", m.accuracy},
                {"f1", m.f1},
                {"n_train", m.n_train},
                {"n_test", m.n_test}};
  };
  json cv = {{"provenance", provenance(config)},
             {"subset", to_string(config.data.subset)},
             {"n_docs", result.n_docs},
             {"n_folds", result.cv.n_folds},
             {"stratified", result.cv.stratified},
             {"seed", result.cv.seed},
             {"mean", fold_json(result.cv.mean)},
             {"folds", json::array()}};
  for (const auto& f : result.cv.folds) cv["folds"].push_back(fold_json(f));

  const auto& dir = config.model.dir;
  write_file(dir / "tfidf.json", with_provenance(features::tfidf_to_json(tfidf), config));
  write_file(dir / "logreg.json", with_provenance(model::logreg_to_json(logreg), config));
  write_file(dir / "baseline.json", with_provenance(model::baseline_to_json(baseline), config));
  write_file(dir / "cv_report.json", cv.dump(1) + "\n");
  return result;
}

ModelBundle load_models(const fs::path& dir) {
  auto tfidf = features::tfidf_from_json(read_file(dir / "tfidf.json"));
  auto logreg = model::logreg_from_json(read_file(dir / "logreg.json"));
  auto baseline = model::baseline_from_json(read_file(dir / "baseline.json"));
  if (logreg.dimension() != tfidf.size() || baseline.feature_means.size() != tfidf.size()) {
    throw DataError("model files in " + dir.string() + " disagree on the number of features");
  }
  return ModelBundle{std::move(tfidf), std::move(logreg), std::move(baseline)};
}

UserEvidence goml_user_evidence(const corpus::UserRecord& user, const ModelBundle& models, const RunConfig& config,
                                llm::ChatModel* chat) {
  UserEvidence out;
  out.user_id = user.user_id;
  auto highlight_config = config.highlights;
  if (config.mode == EvidenceMode::goml_plus_llm) highlight_config.mode = evidence::HighlightMode::sentence;
  const auto policy = config.model.selection();

  std::vector<std::string> important;
  for (const auto& post : user.posts) {
    const corpus::AnnotatedText text(post.text(config.data.include_title));
    const auto x = features::transform(models.tfidf, text.text.utf8());
    const auto scores = model::shap_scores(models.logreg, x, models.baseline, models.tfidf.terms());
    std::vector<std::string> features;
    for (const auto& s : model::select_important(scores, policy)) features.push_back(s.ngram);
    auto pe = evidence::highlight_post(user.user_id, post.post_id, text, features, highlight_config,
                                       models.tfidf.config());
    for (const auto& f : pe.unaligned_features) {
      out.warnings.push_back("post " + post.post_id + ": feature '" + f + "' not found in text");
    }
    for (auto i : pe.important_sentences) important.push_back(text.sentences[i].span.text);
    std::move(pe.highlights.begin(), pe.highlights.end(), std::back_inserter(out.highlights));
  }

  if (config.mode == EvidenceMode::goml_plus_llm) {
    if (!chat) throw UsageError("goml_plus_llm needs an LLM");
    std::string content;
    for (const auto& s : important) content += (content.empty() ? "" : "\n") + s;
    if (content.empty()) {
      out.warnings.emplace_back("no important sentences; summarizing the posts instead");
      content = document_text(user, config.data.include_title);
    }
    if (llm::truncate_to_context(content, config.llm, config.llm.summary_prompt)) {
      out.warnings.emplace_back("summary input truncated to the context window");
    }
    out.summary = summarize::abstractive_summary(*chat, content, config.summary, config.llm.summary_prompt);
  } else {
    out.summary = summarize::extractive_summary(important, config.summary);
  }
  out.summary.user_id = user.user_id;
  for (auto& w : out.summary.warnings) out.warnings.push_back("summary: " + w);
  return out;
}

UserEvidence llm_user_evidence(const corpus::UserRecord& user, llm::ChatModel& chat, const RunConfig& config) {
  UserEvidence out;
  out.user_id = user.user_id;
  for (const auto& post : user.posts) {
    const IndexedText text(post.text(config.data.include_title));
    if (text.empty()) continue;
    auto r = llm::llm_highlight_post(chat, user.user_id, post.post_id, text, config.llm,
                                     config.highlights.keep_duplicates);
    for (auto& w : r.warnings) out.warnings.push_back("post " + post.post_id + ": " + w);
    std::move(r.highlights.begin(), r.highlights.end(), std::back_inserter(out.highlights));
  }
  std::string content = document_text(user, config.data.include_title);
  if (llm::truncate_to_context(content, config.llm, config.llm.summary_prompt)) {
    out.warnings.emplace_back("summary input truncated to the context window");
  }
  out.summary = summarize::abstractive_summary(chat, content, config.summary, config.llm.summary_prompt);
  out.summary.user_id = user.user_id;
  for (auto& w : out.summary.warnings) out.warnings.push_back("summary: " + w);
  return out;
}

std::string highlight_to_jsonl(const evidence::Highlight& h) {
  json j = {{"user_id", h.user_id}, {"post_id", h.post_id},   {"start", h.span.start},
            {"end", h.span.end},     {"text", h.span.text},     {"source", evidence::to_string(h.source)}};
  if (h.feature) j["feature"] = *h.feature;
  return j.dump();
}

std::string summary_to_jsonl(const summarize::Summary& s) {
  return json{{"user_id", s.user_id}, {"summary", s.text}, {"mode", summarize::to_string(s.mode)}}.dump();
}

namespace {

template <typename Fn>
void for_each_jsonl(const fs::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(number) + ": malformed record: " + e.what());
    }
  }
}

}  // namespace

std::vector<evidence::Highlight> read_highlights(const fs::path& path) {
  std::vector<evidence::Highlight> out;
  for_each_jsonl(path, [&](const json& j) {
    evidence::Highlight h;
    h.user_id = j.at("user_id").get<std::string>();
    h.span.text = j.at("text").get<std::string>();
    h.post_id = j.value("post_id", std::string());
    h.span.start = j.value("start", std::size_t{0});
    h.span.end = j.value("end", std::size_t{0});
    if (auto s = evidence::parse_source(j.value("source", std::string("goml")))) h.source = *s;
    if (j.contains("feature")) h.feature = j.at("feature").get<std::string>();
    out.push_back(std::move(h));
  });
  return out;
}

std::vector<std::pair<std::string, std::string>> read_summaries(const fs::path& path) {
  std::vector<std::pair<std::string, std::string>> out;
  for_each_jsonl(path, [&](const json& j) {
    out.emplace_back(j.at("user_id").get<std::string>(), j.at("summary").get<std::string>());
  });
  return out;
}

EvidenceResult cmd_evidence(const RunConfig& config, llm::ChatModel* chat) {
  config.validate();
  const auto corpus = require_corpus(config);
  EvidenceResult result;
  result.warnings = corpus.warnings;

  std::optional<ModelBundle> models;
  if (config.mode != EvidenceMode::llm) models = load_models(config.model.dir);
  std::unique_ptr<llm::HttpChatClient> http;
  if (config.mode != EvidenceMode::goml && !chat) {
    http = std::make_unique<llm::HttpChatClient>(config.llm);
    chat = http.get();
  }

  const auto n = corpus.users.size();
  std::vector<std::optional<UserEvidence>> done(n);
  std::vector<std::optional<UserFailure>> failed(n);
  parallel_for(n, workers_for(config), [&](std::size_t i) {
    const auto& user = corpus.users[i];
    try {
      done[i] = config.mode == EvidenceMode::llm ? llm_user_evidence(user, *chat, config)
                                                 : goml_user_evidence(user, *models, config, chat);
    } catch (const EndpointError& e) {
      failed[i] = UserFailure{user.user_id, "endpoint", e.what()};
    } catch (const DataError& e) {
      failed[i] = UserFailure{user.user_id, "data", e.what()};
    } catch (const std::exception& e) {
      failed[i] = UserFailure{user.user_id, "error", e.what()};
    }
  });

  std::string highlights, summaries, errors;
  for (std::size_t i = 0; i < n; ++i) {
    if (failed[i]) {
      errors += json{{"user_id", failed[i]->user_id}, {"kind", failed[i]->kind}, {"error", failed[i]->message}}
                    .dump() + "\n";
      result.failures.push_back(std::move(*failed[i]));
      continue;
    }
    auto& ue = *done[i];
    for (const auto& h : ue.highlights) highlights += highlight_to_jsonl(h) + "\n";
    summaries += summary_to_jsonl(ue.summary) + "\n";
    for (const auto& w : ue.warnings) result.warnings.push_back("user " + ue.user_id + ": " + w);
    result.users.push_back(std::move(ue));
  }

  if (n > 0 && result.users.empty()) {
    const auto& first = result.failures.front();
    const auto message = "all " + std::to_string(n) + " users failed; first failure (user " + first.user_id +
                         "): " + first.message;
    write_file(config.output_dir / "errors.jsonl", errors);
    if (first.kind == "endpoint") throw EndpointError(message);
    throw DataError(message);
  }
  if (!result.failures.empty()) {
    result.warnings.push_back(std::to_string(result.failures.size()) + " of " + std::to_string(n) +
                              " users failed; see errors.jsonl");
  }

  const auto& out = config.output_dir;
  write_file(out / "highlights.jsonl", highlights);
  write_file(out / "summaries.jsonl", summaries);
  write_file(out / "errors.jsonl", errors);
  json manifest = {{"provenance", provenance(config)},
                   {"command", "evidence"},
                   {"mode", to_string(config.mode)},
                   {"include_title", config.data.include_title},
                   {"config", json::parse(canonical_config_json(config))},
                   {"users", n},
                   {"users_failed", result.failures.size()},
                   {"files",
                    {{"highlights.jsonl", to_hex(fnv1a64(highlights))},
                     {"summaries.jsonl", to_hex(fnv1a64(summaries))},
                     {"errors.jsonl", to_hex(fnv1a64(errors))}}}};
  write_file(out / "run.json", manifest.dump(1) + "\n");
  return result;
}

namespace {

json scores_json(const eval::HighlightScores& s) {
  return {{"recall", s.recall}, {"precision", s.precision}, {"weighted_recall", s.weighted_recall},
          {"harmonic", s.harmonic}};
}

json scores_json(const eval::SummaryScores& s) {
  return {{"consistency", s.consistency}, {"contradiction", s.contradiction}};
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace

EvaluateResult cmd_evaluate(const RunConfig& config, const fs::path& gold_dir, const fs::path& pred_dir,
                            eval::Embedder* embedder, eval::NliClient* nli) {
  config.validate();
  struct Side {
    std::map<std::string, std::vector<std::string>> highlights;
    std::map<std::string, std::string> summaries;
    bool has_summaries = false;
    std::set<std::string> users;
  };
  auto load_side = [](const fs::path& dir) {
    Side side;
    for (auto& h : read_highlights(dir / "highlights.jsonl")) {
      side.users.insert(h.user_id);
      side.highlights[h.user_id].push_back(std::move(h.span.text));
    }
    if (fs::exists(dir / "summaries.jsonl")) {
      side.has_summaries = true;
      for (auto& [user, text] : read_summaries(dir / "summaries.jsonl")) {
        side.users.insert(user);
        side.summaries[user] = std::move(text);
      }
    }
    return side;
  };
  const auto gold = load_side(gold_dir);
  const auto pred = load_side(pred_dir);

  std::vector<std::string> missing, extra;
  std::set_difference(gold.users.begin(), gold.users.end(), pred.users.begin(), pred.users.end(),
                      std::back_inserter(missing));
  std::set_difference(pred.users.begin(), pred.users.end(), gold.users.begin(), gold.users.end(),
                      std::back_inserter(extra));
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "gold and predicted user sets differ";
    if (!missing.empty()) msg += "; missing from predictions: " + join(missing);
    if (!extra.empty()) msg += "; not in gold: " + join(extra);
    throw DataError(msg);
  }

  std::unique_ptr<eval::Embedder> owned_embedder;
  if (!embedder) {
    owned_embedder = make_embedder(config);
    embedder = owned_embedder.get();
  }
  std::unique_ptr<eval::NliClient> owned_nli;
  if (!nli && !config.eval.nli_endpoint.empty()) {
    owned_nli = std::make_unique<eval::HttpNliClient>(eval::HttpEndpoint{
        config.eval.nli_endpoint, config.eval.api_key, std::chrono::seconds(config.eval.timeout_seconds), 2});
    nli = owned_nli.get();
  }

  EvaluateResult result;
  const bool score_summaries = gold.has_summaries && pred.has_summaries && nli;
  if (gold.has_summaries && pred.has_summaries && !nli) {
    result.warnings.emplace_back("summaries not scored: no NLI endpoint configured");
  }

  const std::vector<std::string> users(gold.users.begin(), gold.users.end());
  std::vector<UserScores> scores(users.size());
  std::vector<std::vector<std::string>> notes(users.size());
  static const std::vector<std::string> none;
  parallel_for(users.size(), workers_for(config), [&](std::size_t i) {
    const auto& id = users[i];
    scores[i].user_id = id;
    auto find = [&](const Side& side) -> const std::vector<std::string>& {
      const auto it = side.highlights.find(id);
      return it == side.highlights.end() ? none : it->second;
    };
    const auto& g = find(gold);
    if (g.empty()) {
      notes[i].push_back("user " + id + ": no gold highlights; highlight scores skipped");
    } else {
      scores[i].highlights = eval::score_highlights(g, find(pred), *embedder);
    }
    if (!score_summaries) return;
    const auto gs = gold.summaries.find(id);
    const auto ps = pred.summaries.find(id);
    if (gs == gold.summaries.end() || ps == pred.summaries.end()) {
      notes[i].push_back("user " + id + ": summary missing on one side; summary scores skipped");
      return;
    }
    std::vector<std::string> premises;
    for (const auto& s : corpus::split_sentences(gs->second)) premises.push_back(s.span.text);
    if (premises.empty() || corpus::split_sentences(ps->second).empty()) {
      notes[i].push_back("user " + id + ": empty summary; summary scores skipped");
      return;
    }
    scores[i].summary = eval::summary_scores(premises, ps->second, *nli);
  });
  for (auto& n : notes) std::move(n.begin(), n.end(), std::back_inserter(result.warnings));
  result.users = std::move(scores);

  eval::HighlightScores hsum;
  eval::SummaryScores ssum;
  std::size_t hn = 0, sn = 0;
  for (const auto& u : result.users) {
    if (u.highlights) {
      hsum.recall += u.highlights->recall;
      hsum.precision += u.highlights->precision;
      hsum.weighted_recall += u.highlights->weighted_recall;
      ++hn;
    }
    if (u.summary) {
      ssum.consistency += u.summary->consistency;
      ssum.contradiction += u.summary->contradiction;
      ++sn;
    }
  }
  if (hn > 0) {
    const auto d = static_cast<double>(hn);
    // The corpus harmonic is taken of the mean recall and precision.
    result.mean_highlights = eval::HighlightScores{hsum.recall / d, hsum.precision / d, hsum.weighted_recall / d,
                                                   eval::harmonic(hsum.recall / d, hsum.precision / d)};
  }
  if (sn > 0) {
    result.mean_summary = eval::SummaryScores{ssum.consistency / static_cast<double>(sn),
                                              ssum.contradiction / static_cast<double>(sn)};
  }

  json report = {{"provenance", provenance(config)},
                 {"config", json::parse(canonical_config_json(config))},
                 {"seed", config.seed},
                 {"n_users", users.size()},
                 {"users", json::array()},
                 {"mean",
                  {{"highlights", result.mean_highlights ? scores_json(*result.mean_highlights) : json(nullptr)},
                   {"summary", result.mean_summary ? scores_json(*result.mean_summary) : json(nullptr)}}},
                 {"warnings", result.warnings}};
  for (const auto& u : result.users) {
    report["users"].push_back({{"user_id", u.user_id},
                               {"highlights", u.highlights ? scores_json(*u.highlights) : json(nullptr)},
                               {"summary", u.summary ? scores_json(*u.summary) : json(nullptr)}});
  }
  write_file(config.output_dir / "evaluation.json", report.dump(1) + "\n");
  return result;
}

std::vector<analysis::ComparisonRow> cmd_analyze(const RunConfig& config, const fs::path& pred_dir) {
  config.validate();
  const auto corpus = require_corpus(config);
  const auto highlights = read_highlights(pred_dir / "highlights.jsonl");
  for (const auto& h : highlights) {
    if (h.post_id.empty() || h.span.end <= h.span.start) {
      throw DataError("analysis needs highlights with post_id, start and end (user " + h.user_id + ")");
    }
  }
  const analysis::HeuristicTagger tagger(analysis::parse_pos_tag(config.analysis.tagger_fallback));
  const analysis::PermutationOptions options{config.analysis.n_permutations, config.seed, workers_for(config)};
  auto rows = analysis::compare_important_vs_other(corpus, highlights, tagger, options, config.data.include_title);

  std::ostringstream csv;
  analysis::write_comparison_csv(csv, rows);
  json j = {{"provenance", provenance(config)}, {"n_permutations", options.n_permutations}, {"rows", json::array()}};
  for (const auto& r : rows) {
    j["rows"].push_back({{"tag", r.name},
                         {"mean_important", r.test.mean_a},
                         {"mean_other", r.test.mean_b},
                         {"diff", r.test.observed},
                         {"p_value", r.test.p_value}});
  }
  write_file(config.output_dir / "analysis.csv", csv.str());
  write_file(config.output_dir / "analysis.json", j.dump(1) + "\n");
  return rows;
}

std::vector<Topic> cmd_topics(const RunConfig& config, eval::Embedder* embedder, llm::ChatModel* chat) {
  config.validate();
  const auto corpus = require_corpus(config);
  std::vector<std::string> docs;
  for (const auto& user : corpus.users) {
    if (config.data.unit == DocumentUnit::user) {
      docs.push_back(document_text(user, config.data.include_title));
    } else {
      for (const auto& post : user.posts) docs.push_back(post.text(config.data.include_title));
    }
  }
  std::unique_ptr<eval::Embedder> owned_embedder;
  if (!embedder) {
    owned_embedder = make_embedder(config);
    embedder = owned_embedder.get();
  }
  const auto vectors = embedder->embed_batch(docs);
  const auto clusters = analysis::cluster_docs(vectors, config.topics.k, config.seed);

  std::vector<std::vector<std::string>> grouped(config.topics.k);
  for (std::size_t i = 0; i < docs.size(); ++i) grouped[clusters.assignments[i]].push_back(docs[i]);
  const auto keywords = analysis::ctfidf(grouped, config.topics.top_k);

  std::unique_ptr<llm::HttpChatClient> http;
  if (config.topics.label_with_llm && !chat) {
    http = std::make_unique<llm::HttpChatClient>(config.llm);
    chat = http.get();
  }
  std::vector<Topic> topics;
  json j = {{"provenance", provenance(config)}, {"k", config.topics.k}, {"topics", json::array()}};
  for (std::size_t c = 0; c < keywords.size(); ++c) {
    Topic t{keywords[c], grouped[c].size(), std::nullopt};
    if (config.topics.label_with_llm) {
      const std::size_t shown = std::min(config.topics.documents_per_label, grouped[c].size());
      const auto prompt = analysis::topic_label_prompt(std::span(grouped[c]).first(shown), t.keywords.keywords);
      auto text = chat->complete(prompt, 0).text;
      const auto b = text.find_first_not_of(" \t\r\n");
      const auto e = text.find_last_not_of(" \t\r\n");
      t.label = b == std::string::npos ? std::string() : text.substr(b, e - b + 1);
    }
    json entry = {{"cluster_id", c}, {"size", t.size}, {"keywords", json::array()}, {"scores", json::array()}};
    for (const auto& k : t.keywords.keywords) {
      entry["keywords"].push_back(k.term);
      entry["scores"].push_back(k.score);
    }
    if (t.label) entry["label"] = *t.label;
    j["topics"].push_back(std::move(entry));
    topics.push_back(std::move(t));
  }
  write_file(config.output_dir / "topics.json", j.dump(1) + "\n");
  return topics;
}

}  // namespace riskev::cli
