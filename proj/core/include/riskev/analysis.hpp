#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskev/corpus.hpp"
#include "riskev/evidence.hpp"

namespace riskev::analysis {

enum class PosTag { noun, verb, adj, adv, pron, other };

/// Tags that appear in reports, in report order. OTHER is never reported.
inline constexpr std::array<PosTag, 5> kReportedTags{PosTag::noun, PosTag::verb, PosTag::adj, PosTag::adv,
                                                     PosTag::pron};

std::string_view to_string(PosTag tag);
PosTag parse_pos_tag(std::string_view name);

class Tagger {
 public:
  virtual ~Tagger() = default;
  /// Exactly one tag per token.
  virtual std::vector<PosTag> tag(std::span<const std::string> tokens) const = 0;
};

/// Closed-class lexicon, a small open-class lexicon and suffix rules. Good
/// enough for tests and rough corpus statistics; plug in a real tagger for
/// anything else.
class HeuristicTagger final : public Tagger {
 public:
  explicit HeuristicTagger(PosTag fallback = PosTag::noun) : fallback_(fallback) {}
  std::vector<PosTag> tag(std::span<const std::string> tokens) const override;
  PosTag tag_one(std::string_view token) const;

 private:
  PosTag fallback_;
};

std::vector<PosTag> tag_pos(std::span<const corpus::TokenSpan> tokens, const Tagger& tagger);

struct SentenceStats {
  /// Share of tokens carrying each tag in kReportedTags order.
  std::array<double, 5> proportions{};
  std::size_t length = 0;
  bool important = false;
};

/// Statistics of one tagged sentence. Empty tag lists give zero proportions.
SentenceStats sentence_stats(std::span<const PosTag> tags, bool important);

struct PermutationOptions {
  std::size_t n_permutations = 100000;
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0 = hardware concurrency
};

struct PermutationResult {
  double mean_a = 0.0;
  double mean_b = 0.0;
  /// mean_a - mean_b
  double observed = 0.0;
  double p_value = 1.0;
  std::size_t n_permutations = 0;
  std::uint64_t seed = 0;
};

/// Two-sided label-shuffling test of the difference in means with add-one
/// smoothing. Results depend only on the inputs and seed, not on the number
/// of workers.
PermutationResult permutation_test(std::span<const double> group_a, std::span<const double> group_b,
                                   const PermutationOptions& options = {});

struct ComparisonRow {
  std::string name;  // tag name or "LENGTH"
  PermutationResult test;
};

/// One row per reported tag plus sentence length; group a is the important
/// sentences. Throws DataError when either group is empty.
std::vector<ComparisonRow> compare_groups(std::span<const SentenceStats> sentences,
                                          const PermutationOptions& options = {});

/// Splits every sentence of the corpus by whether it overlaps a highlight of
/// its post, tags it and compares the two groups.
std::vector<ComparisonRow> compare_important_vs_other(const corpus::Corpus& corpus,
                                                      std::span<const evidence::Highlight> highlights,
                                                      const Tagger& tagger, const PermutationOptions& options = {},
                                                      bool include_title = true);

/// CSV with header tag,mean_important,mean_other,diff,p_value.
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);

struct Keyword {
  std::string term;
  double score = 0.0;
};

struct ClusterKeywords {
  std::size_t cluster_id = 0;
  std::vector<Keyword> keywords;
};

struct CtfidfMatrix {
  std::vector<std::string> vocabulary;       // sorted
  std::vector<std::vector<double>> scores;   // [cluster][term]
};

/// score(t, c) = tf(t, c) * ln(1 + A / f(t)) over lowercased word tokens,
/// where A is the average token count per cluster. Needs at least two
/// clusters, none of them without documents.
CtfidfMatrix ctfidf_scores(std::span<const std::vector<std::string>> clusters);

/// Top-k terms per cluster by score, ties broken by term. k is clamped to
/// the vocabulary size.
std::vector<ClusterKeywords> ctfidf(std::span<const std::vector<std::string>> clusters, std::size_t top_k = 10);

std::string topics_to_json(std::span<const ClusterKeywords> topics);

struct ClusterResult {
  std::vector<std::size_t> assignments;
  std::vector<std::vector<double>> centroids;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Spherical k-means with k-means++ seeding. Inputs are expected to be unit
/// vectors; every cluster ends up non-empty.
ClusterResult cluster_docs(std::span<const std::vector<double>> vectors, std::size_t k, std::uint64_t seed = 0,
                           std::size_t max_iterations = 300);

inline constexpr std::string_view kTopicLabelPrompt =
    "I have a topic that contains the following documents: [DOCUMENTS]. "
    "The topic is described by the following keywords: '[KEYWORDS]'. "
    "As an expert psychologist and therapist, provide a brief 5 word phrase to summarize the reason:";

/// Fills kTopicLabelPrompt; documents are newline-joined, keywords comma-joined.
std::string topic_label_prompt(std::span<const std::string> documents, std::span<const Keyword> keywords);

}  // namespace riskev::analysis
