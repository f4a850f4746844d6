#include "riskev/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "riskev/corpus.hpp"
#include "riskev/error.hpp"
#include "riskev/text.hpp"

namespace riskev::features {

using json = nlohmann::json;

namespace {
constexpr int kFormatVersion = 1;
}

void TfidfConfig::validate() const {
  if (ngram_min < 1 || ngram_min > ngram_max) throw DataError("tf-idf: require 1 <= ngram_min <= ngram_max");
  if (min_df < 1) throw DataError("tf-idf: min_df must be >= 1");
  if (max_features && *max_features == 0) throw DataError("tf-idf: max_features must be positive");
}

double SparseVector::norm() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.value * e.value;
  return std::sqrt(s);
}

double SparseVector::at(std::uint32_t index) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), index,
                             [](const SparseEntry& e, std::uint32_t i) { return e.index < i; });
  return it != entries.end() && it->index == index ? it->value : 0.0;
}

double SparseVector::dot(std::span<const double> dense) const {
  double s = 0.0;
  for (const auto& e : entries) s += e.value * dense[e.index];
  return s;
}

std::string normalize_term(std::string_view token, const TfidfConfig& config) {
  std::string out = config.lowercase ? to_lower(token) : std::string(token);
  return config.strip_accents ? strip_accents(out) : out;
}

std::vector<std::string> analyze(std::string_view doc, const TfidfConfig& config) {
  std::vector<std::string> out;
  for (const auto& tok : corpus::word_tokenize(doc)) out.push_back(normalize_term(tok.text, config));
  return out;
}

std::vector<std::string> extract_ngrams(std::span<const std::string> tokens, std::size_t n_min,
                                        std::size_t n_max) {
  std::vector<std::string> out;
  for (std::size_t n = n_min; n <= n_max && n <= tokens.size(); ++n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t k = 1; k < n; ++k) {
        gram.push_back(' ');
        gram += tokens[i + k];
      }
      out.push_back(std::move(gram));
    }
  }
  return out;
}

double inverse_document_frequency(std::size_t n_docs, std::size_t df, bool smooth) {
  const double n = static_cast<double>(n_docs);
  const double d = static_cast<double>(df);
  return smooth ? std::log((1.0 + n) / (1.0 + d)) + 1.0 : std::log(n / d) + 1.0;
}

TfidfModel::TfidfModel(TfidfConfig config, std::vector<std::string> terms, std::vector<std::size_t> df,
                       std::size_t n_docs)
    : config_(std::move(config)), terms_(std::move(terms)), df_(std::move(df)), n_docs_(n_docs) {
  config_.validate();
  if (terms_.size() != df_.size()) throw DataError("tf-idf: vocabulary and df sizes differ");
  if (terms_.empty()) throw DataError("empty vocabulary");
  idf_.reserve(terms_.size());
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) throw DataError("tf-idf: vocabulary must be sorted and unique");
    if (df_[i] == 0 || df_[i] > n_docs_) throw DataError("tf-idf: document frequency out of range for '" + terms_[i] + "'");
    idf_.push_back(inverse_document_frequency(n_docs_, df_[i], config_.smooth_idf));
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  }
}

std::optional<std::uint32_t> TfidfModel::index_of(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::vector<std::string> doc_ngrams(std::string_view doc, const TfidfConfig& config) {
  const auto tokens = analyze(doc, config);
  return extract_ngrams(tokens, config.ngram_min, config.ngram_max);
}

}  // namespace

TfidfModel fit_tfidf(std::span<const std::string> docs, const TfidfConfig& config) {
  config.validate();
  if (docs.empty()) throw DataError("tf-idf: no documents to fit");

  struct Counts {
    std::size_t df = 0;
    std::size_t total = 0;
  };
  std::map<std::string, Counts> counts;
  for (const auto& doc : docs) {
    auto grams = doc_ngrams(doc, config);
    std::sort(grams.begin(), grams.end());
    for (std::size_t i = 0; i < grams.size();) {
      std::size_t j = i;
      while (j < grams.size() && grams[j] == grams[i]) ++j;
      auto& c = counts[grams[i]];
      c.df += 1;
      c.total += j - i;
      i = j;
    }
  }

  std::vector<std::pair<std::string, Counts>> kept;
  for (auto& [term, c] : counts) {
    if (c.df >= config.min_df) kept.emplace_back(term, c);
  }
  if (config.max_features && kept.size() > *config.max_features) {
    // Keep the most frequent n-grams corpus-wide; ties by term.
    std::stable_sort(kept.begin(), kept.end(),
                     [](const auto& x, const auto& y) { return x.second.total > y.second.total; });
    kept.resize(*config.max_features);
    std::sort(kept.begin(), kept.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  }
  if (kept.empty()) throw DataError("empty vocabulary");

  std::vector<std::string> terms;
  std::vector<std::size_t> df;
  terms.reserve(kept.size());
  df.reserve(kept.size());
  for (auto& [term, c] : kept) {
    terms.push_back(term);
    df.push_back(c.df);
  }
  return TfidfModel(config, std::move(terms), std::move(df), docs.size());
}

SparseVector transform(const TfidfModel& model, std::string_view doc) {
  const auto& config = model.config();
  std::map<std::uint32_t, std::size_t> tf;
  for (const auto& gram : doc_ngrams(doc, config)) {
    if (auto idx = model.index_of(gram)) ++tf[*idx];
  }
  SparseVector v;
  v.dimension = model.size();
  v.entries.reserve(tf.size());
  const auto& idf = model.idf();
  for (const auto& [index, count] : tf) {
    const double c = static_cast<double>(count);
    const double weight = config.sublinear_tf ? 1.0 + std::log(c) : c;
    v.entries.push_back(SparseEntry{index, weight * idf[index]});
  }
  if (config.l2_normalize) {
    const double norm = v.norm();
    if (norm > 0.0) {
      for (auto& e : v.entries) e.value /= norm;
    }
  }
  return v;
}

std::vector<SparseVector> transform_all(const TfidfModel& model, std::span<const std::string> docs) {
  std::vector<SparseVector> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(transform(model, d));
  return out;
}

namespace {

json config_to_json(const TfidfConfig& c) {
  json j = {{"ngram_min", c.ngram_min},         {"ngram_max", c.ngram_max},
            {"min_df", c.min_df},               {"strip_accents", c.strip_accents ? "unicode" : "none"},
            {"lowercase", c.lowercase},         {"smooth_idf", c.smooth_idf},
            {"sublinear_tf", c.sublinear_tf},   {"norm", c.l2_normalize ? "l2" : "none"}};
  j["max_features"] = c.max_features ? json(*c.max_features) : json(nullptr);
  return j;
}

TfidfConfig config_from_json(const json& j) {
  TfidfConfig c;
  c.ngram_min = j.at("ngram_min").get<std::size_t>();
  c.ngram_max = j.at("ngram_max").get<std::size_t>();
  c.min_df = j.at("min_df").get<std::size_t>();
  if (!j.at("max_features").is_null()) c.max_features = j.at("max_features").get<std::size_t>();
  c.strip_accents = j.at("strip_accents").get<std::string>() == "unicode";
  c.lowercase = j.at("lowercase").get<bool>();
  c.smooth_idf = j.at("smooth_idf").get<bool>();
  c.sublinear_tf = j.at("sublinear_tf").get<bool>();
  c.l2_normalize = j.at("norm").get<std::string>() == "l2";
  return c;
}

}  // namespace

std::string tfidf_to_json(const TfidfModel& model) {
  json j = {{"format", "riskev.tfidf"},
            {"format_version", kFormatVersion},
            {"config", config_to_json(model.config())},
            {"n_docs", model.n_docs()},
            {"vocabulary", model.terms()},
            {"df", model.df()},
            {"idf", model.idf()}};
  return j.dump(1);
}

TfidfModel tfidf_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("tf-idf model: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) throw DataError("tf-idf model: unsupported format_version");
    TfidfModel model(config_from_json(j.at("config")), j.at("vocabulary").get<std::vector<std::string>>(),
                     j.at("df").get<std::vector<std::size_t>>(), j.at("n_docs").get<std::size_t>());
    if (auto it = j.find("idf"); it != j.end()) {
      const auto stored = it->get<std::vector<double>>();
      if (stored.size() != model.size()) throw DataError("tf-idf model: idf length mismatch");
      for (std::size_t i = 0; i < stored.size(); ++i) {
        if (std::abs(stored[i] - model.idf()[i]) > 1e-12) {
          throw DataError("tf-idf model: stored idf disagrees with df for '" + model.terms()[i] + "'");
        }
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("tf-idf model: ") + e.what());
  }
}

}  // namespace riskev::features
