#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskev/corpus.hpp"
#include "riskev/features.hpp"

namespace riskev::evidence {

using corpus::Sentence;
using corpus::Span;
using corpus::TokenSpan;

enum class Source { goml, llm };
std::string_view to_string(Source source);
std::optional<Source> parse_source(std::string_view value);

/// A verbatim span of a post offered as evidence.
struct Highlight {
  std::string user_id;
  std::string post_id;
  Span span;
  Source source = Source::goml;
  /// N-gram that triggered a GOML highlight.
  std::optional<std::string> feature;

  friend bool operator==(const Highlight&, const Highlight&) = default;
};

enum class HighlightMode {
  window,    // context window of window_words tokens around the feature, within its sentence
  sentence,  // the whole sentence containing the feature
};
std::string_view to_string(HighlightMode mode);
std::optional<HighlightMode> parse_highlight_mode(std::string_view value);

inline constexpr std::size_t kUnboundedWindow = std::numeric_limits<std::size_t>::max();

struct HighlightConfig {
  HighlightMode mode = HighlightMode::sentence;
  std::size_t window_words = 14;
  bool keep_duplicates = false;
  /// Union overlapping (non-nested) highlights of a post into one span.
  bool merge_overlaps = false;
};

/// Every occurrence of `feature` (space-separated normalized words) as
/// consecutive tokens. Spans run from the first token's start to the last
/// token's end and keep the original casing and punctuation.
std::vector<Span> align_feature(const IndexedText& text, std::span<const TokenSpan> tokens, std::string_view feature,
                                const features::TfidfConfig& normalization = {});

/// Grows `span` by up to `window_words` tokens on each side without leaving
/// the sentence that contains span.start. When the window is cut short by the
/// sentence, that side extends to the sentence boundary, so an unbounded
/// window yields exactly the sentence.
Span window_highlight(const IndexedText& text, const Span& span, std::span<const Sentence> sentences,
                      std::span<const TokenSpan> tokens, std::size_t window_words = 14);

/// The full sentence containing span.start.
Span sentence_highlight(const Span& span, std::span<const Sentence> sentences);

/// Unless keep_duplicates: per post, drops exact duplicates and any highlight
/// whose text is a substring of a longer kept one, then sorts by
/// (post_id, start, end). With keep_duplicates the input is returned as is.
std::vector<Highlight> dedup_highlights(std::vector<Highlight> highlights, bool keep_duplicates);

/// Replaces overlapping highlights of a single post with their union.
std::vector<Highlight> merge_overlapping(std::vector<Highlight> highlights, const IndexedText& text);

/// Highlights for one post from its important features.
struct PostEvidence {
  std::vector<Highlight> highlights;
  /// Sentence indices holding at least one feature occurrence, ascending.
  std::vector<std::size_t> important_sentences;
  /// Features with no occurrence in the text. Non-empty means the feature
  /// list did not come from this post's own vector.
  std::vector<std::string> unaligned_features;
};

PostEvidence highlight_post(std::string_view user_id, std::string_view post_id, const corpus::AnnotatedText& post,
                            std::span<const std::string> features, const HighlightConfig& config,
                            const features::TfidfConfig& normalization = {});

}  // namespace riskev::evidence
