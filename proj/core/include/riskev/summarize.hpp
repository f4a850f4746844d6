#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskev/llm.hpp"

namespace riskev::summarize {

enum class SummaryMode { extractive, abstractive };
std::string_view to_string(SummaryMode mode);
std::optional<SummaryMode> parse_summary_mode(std::string_view value);

struct SummaryConfig {
  SummaryMode mode = SummaryMode::extractive;
  std::size_t max_words = 300;
  std::size_t n_sentences = 5;
  double damping = 0.85;
  double convergence_eps = 1e-6;
  std::size_t max_iterations = 100;

  void validate() const;
};

struct Summary {
  std::string user_id;
  std::string text;
  SummaryMode mode = SummaryMode::extractive;
  /// Extractive: indices of the chosen input sentences, in document order.
  std::vector<std::size_t> source_sentences;
  /// Abstractive: fingerprint of the rendered prompt.
  std::string prompt_fingerprint;
  std::vector<std::string> warnings;
};

struct RankedSentence {
  std::size_t index = 0;
  /// Score divided by the sum over all sentences.
  double score = 0.0;
  /// Unnormalized TextRank score; an isolated sentence converges to 1 - d.
  double raw = 0.0;
};

struct TextRankResult {
  /// Descending by score, ties by original order.
  std::vector<RankedSentence> ranking;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Content words used for sentence similarity: lowercased regex tokens minus
/// a built-in function-word list.
std::vector<std::string> content_words(std::string_view sentence);

/// |shared distinct content words| / (ln|S_i| + ln|S_j|); 0 when the
/// denominator is not positive.
double sentence_similarity(std::span<const std::string> a, std::span<const std::string> b);

/// Weighted PageRank over the sentence similarity graph:
///   WS(i) = (1 - d) + d * sum_j w_ji / (sum_k w_jk) * WS(j)
/// iterated (Jacobi) until the largest change of the sum-normalized scores
/// falls below convergence_eps.
TextRankResult textrank(std::span<const std::string> sentences, const SummaryConfig& config = {});

std::size_t word_count(std::string_view text);
/// First `max_words` whitespace-delimited words, verbatim.
std::string truncate_words(std::string_view text, std::size_t max_words);

/// Top n_sentences by TextRank, restored to input order, joined by a space,
/// and cut at a sentence boundary so the result has at most max_words words.
Summary extractive_summary(std::span<const std::string> important_sentences, const SummaryConfig& config = {});

/// One call with the summary prompt; the response is trimmed and cut to
/// max_words. An empty response is an EndpointError.
Summary abstractive_summary(llm::ChatModel& model, std::string_view content_body, const SummaryConfig& config = {},
                            std::string_view prompt_template = llm::kSummaryPrompt);

}  // namespace riskev::summarize
