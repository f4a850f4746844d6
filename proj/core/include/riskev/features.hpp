#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace riskev::features {

/// Word n-gram tf-idf settings. Defaults reproduce the GOML vectorizer:
/// 2..4-grams, min_df 1, no feature cap, accent stripping, smoothed idf,
/// sublinear tf and L2 normalization.
struct TfidfConfig {
  std::size_t ngram_min = 2;
  std::size_t ngram_max = 4;
  std::size_t min_df = 1;
  std::optional<std::size_t> max_features;
  bool strip_accents = true;
  bool lowercase = true;
  bool smooth_idf = true;
  bool sublinear_tf = true;
  bool l2_normalize = true;

  void validate() const;
  friend bool operator==(const TfidfConfig&, const TfidfConfig&) = default;
};

struct SparseEntry {
  std::uint32_t index = 0;
  double value = 0.0;
  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Entries sorted by index, no duplicates.
struct SparseVector {
  std::size_t dimension = 0;
  std::vector<SparseEntry> entries;

  double norm() const;
  double at(std::uint32_t index) const;
  double dot(std::span<const double> dense) const;
  bool empty() const noexcept { return entries.empty(); }
};

/// Lowercasing then accent stripping, as configured.
std::string normalize_term(std::string_view token, const TfidfConfig& config);

/// Regex word tokens of `doc`, normalized with normalize_term.
std::vector<std::string> analyze(std::string_view doc, const TfidfConfig& config);

/// Every contiguous n-gram for n in [n_min, n_max], space-joined, grouped by
/// n and in document order within each n.
std::vector<std::string> extract_ngrams(std::span<const std::string> tokens, std::size_t n_min,
                                        std::size_t n_max);

class TfidfModel {
 public:
  /// `terms` must be sorted and unique; idf is derived here so the smooth-idf
  /// invariant always holds.
  TfidfModel(TfidfConfig config, std::vector<std::string> terms, std::vector<std::size_t> df,
             std::size_t n_docs);

  const TfidfConfig& config() const noexcept { return config_; }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::size_t>& df() const noexcept { return df_; }
  const std::vector<double>& idf() const noexcept { return idf_; }
  std::size_t n_docs() const noexcept { return n_docs_; }
  std::size_t size() const noexcept { return terms_.size(); }

  std::optional<std::uint32_t> index_of(const std::string& term) const;

 private:
  TfidfConfig config_;
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// ln((1 + n) / (1 + df)) + 1 when smoothing, ln(n / df) + 1 otherwise.
double inverse_document_frequency(std::size_t n_docs, std::size_t df, bool smooth);

/// Vocabulary indices follow lexicographic order of the n-grams.
/// Throws DataError("empty vocabulary") when no document yields an n-gram.
TfidfModel fit_tfidf(std::span<const std::string> docs, const TfidfConfig& config = {});

/// (1 + ln tf) * idf per in-vocabulary n-gram, then L2-normalized.
SparseVector transform(const TfidfModel& model, std::string_view doc);
std::vector<SparseVector> transform_all(const TfidfModel& model, std::span<const std::string> docs);

std::string tfidf_to_json(const TfidfModel& model);
/// Rebuilds the model and checks any stored idf against the recomputed one.
TfidfModel tfidf_from_json(std::string_view text);

}  // namespace riskev::features
