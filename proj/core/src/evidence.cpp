#include "riskev/evidence.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "riskev/error.hpp"

namespace riskev::evidence {

std::string_view to_string(Source source) { return source == Source::goml ? "goml" : "llm"; }

std::optional<Source> parse_source(std::string_view value) {
  if (value == "goml") return Source::goml;
  if (value == "llm") return Source::llm;
  return std::nullopt;
}

std::string_view to_string(HighlightMode mode) { return mode == HighlightMode::window ? "window" : "sentence"; }

std::optional<HighlightMode> parse_highlight_mode(std::string_view value) {
  if (value == "window") return HighlightMode::window;
  if (value == "sentence") return HighlightMode::sentence;
  return std::nullopt;
}

namespace {

std::vector<std::string> split_words(std::string_view feature) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < feature.size()) {
    while (i < feature.size() && feature[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < feature.size() && feature[i] != ' ') ++i;
    if (i > start) words.emplace_back(feature.substr(start, i - start));
  }
  return words;
}

const Sentence* containing_sentence(std::span<const Sentence> sentences, std::size_t pos) {
  auto it = std::upper_bound(sentences.begin(), sentences.end(), pos,
                             [](std::size_t p, const Sentence& s) { return p < s.span.start; });
  if (it == sentences.begin()) return nullptr;
  --it;
  return it->span.contains(pos) ? &*it : nullptr;
}

}  // namespace

std::vector<Span> align_feature(const IndexedText& text, std::span<const TokenSpan> tokens, std::string_view feature,
                                const features::TfidfConfig& normalization) {
  const auto words = split_words(feature);
  std::vector<Span> out;
  if (words.empty() || words.size() > tokens.size()) return out;

  std::vector<std::string> normalized;
  normalized.reserve(tokens.size());
  for (const auto& t : tokens) normalized.push_back(features::normalize_term(t.text, normalization));

  for (std::size_t i = 0; i + words.size() <= tokens.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < words.size() && match; ++k) match = normalized[i + k] == words[k];
    if (!match) continue;
    const std::size_t start = tokens[i].start;
    const std::size_t end = tokens[i + words.size() - 1].end;
    out.push_back(Span{start, end, text.slice(start, end)});
  }
  return out;
}

Span window_highlight(const IndexedText& text, const Span& span, std::span<const Sentence> sentences,
                      std::span<const TokenSpan> tokens, std::size_t window_words) {
  const Sentence* sentence = containing_sentence(sentences, span.start);
  if (!sentence) throw DataError("highlight span does not start inside a sentence");
  const auto& s = sentence->span;
  const std::size_t clipped_end = std::min(span.end, s.end);

  // Tokens of the sentence: [first_tok, last_tok].
  auto begin = std::lower_bound(tokens.begin(), tokens.end(), s.start,
                                [](const TokenSpan& t, std::size_t p) { return t.start < p; });
  auto finish = std::lower_bound(begin, tokens.end(), s.end,
                                 [](const TokenSpan& t, std::size_t p) { return t.start < p; });
  if (begin == finish) return Span{span.start, clipped_end, text.slice(span.start, clipped_end)};
  const auto first_tok = static_cast<std::size_t>(begin - tokens.begin());
  const auto last_tok = static_cast<std::size_t>(finish - tokens.begin()) - 1;

  // Feature tokens: the first token starting at/after span.start and the last
  // token ending at/before the clipped end.
  std::size_t feat_first = first_tok;
  while (feat_first <= last_tok && tokens[feat_first].start < span.start) ++feat_first;
  std::size_t feat_last = feat_first;
  while (feat_last + 1 <= last_tok && tokens[feat_last + 1].end <= clipped_end) ++feat_last;
  if (feat_first > last_tok) {
    return Span{span.start, clipped_end, text.slice(span.start, clipped_end)};
  }

  std::size_t start = span.start;
  std::size_t end = clipped_end;
  const std::size_t left_available = feat_first - first_tok;
  const std::size_t right_available = last_tok - feat_last;
  if (left_available < window_words) {
    start = s.start;
  } else if (window_words > 0) {
    start = std::min(start, tokens[feat_first - window_words].start);
  }
  if (right_available < window_words) {
    end = s.end;
  } else if (window_words > 0) {
    end = std::max(end, tokens[feat_last + window_words].end);
  }
  return Span{start, end, text.slice(start, end)};
}

Span sentence_highlight(const Span& span, std::span<const Sentence> sentences) {
  const Sentence* sentence = containing_sentence(sentences, span.start);
  if (!sentence) throw DataError("highlight span does not start inside a sentence");
  return sentence->span;
}

std::vector<Highlight> dedup_highlights(std::vector<Highlight> highlights, bool keep_duplicates) {
  if (keep_duplicates) return highlights;

  std::map<std::string, std::vector<Highlight>> by_post;
  for (auto& h : highlights) by_post[h.post_id].push_back(std::move(h));

  std::vector<Highlight> out;
  for (auto& [post_id, group] : by_post) {
    // Longest first; among equal lengths earliest position, then feature.
    std::sort(group.begin(), group.end(), [](const Highlight& a, const Highlight& b) {
      if (a.span.text.size() != b.span.text.size()) return a.span.text.size() > b.span.text.size();
      if (a.span.start != b.span.start) return a.span.start < b.span.start;
      if (a.span.end != b.span.end) return a.span.end < b.span.end;
      return a.feature < b.feature;
    });
    std::vector<Highlight> kept;
    for (auto& h : group) {
      const bool covered = std::any_of(kept.begin(), kept.end(), [&](const Highlight& k) {
        return k.span.text.find(h.span.text) != std::string::npos;
      });
      if (!covered) kept.push_back(std::move(h));
    }
    std::sort(kept.begin(), kept.end(), [](const Highlight& a, const Highlight& b) {
      return a.span.start != b.span.start ? a.span.start < b.span.start : a.span.end < b.span.end;
    });
    for (auto& h : kept) out.push_back(std::move(h));
  }
  return out;
}

std::vector<Highlight> merge_overlapping(std::vector<Highlight> highlights, const IndexedText& text) {
  std::sort(highlights.begin(), highlights.end(), [](const Highlight& a, const Highlight& b) {
    return a.span.start != b.span.start ? a.span.start < b.span.start : a.span.end < b.span.end;
  });
  std::vector<Highlight> out;
  for (auto& h : highlights) {
    if (!out.empty() && out.back().post_id == h.post_id && h.span.start < out.back().span.end) {
      auto& last = out.back();
      if (h.span.end > last.span.end) {
        last.span.end = h.span.end;
        last.span.text = text.slice(last.span.start, last.span.end);
      }
      continue;
    }
    out.push_back(std::move(h));
  }
  return out;
}

PostEvidence highlight_post(std::string_view user_id, std::string_view post_id, const corpus::AnnotatedText& post,
                            std::span<const std::string> features, const HighlightConfig& config,
                            const features::TfidfConfig& normalization) {
  PostEvidence result;
  std::set<std::size_t> important;
  for (const auto& feature : features) {
    const auto spans = align_feature(post.text, post.tokens, feature, normalization);
    if (spans.empty()) {
      result.unaligned_features.push_back(feature);
      continue;
    }
    for (const auto& span : spans) {
      const auto sentence = post.sentence_at(span.start);
      if (!sentence) continue;
      important.insert(*sentence);
      Highlight h;
      h.user_id = std::string(user_id);
      h.post_id = std::string(post_id);
      h.source = Source::goml;
      h.feature = feature;
      h.span = config.mode == HighlightMode::sentence
                   ? sentence_highlight(span, post.sentences)
                   : window_highlight(post.text, span, post.sentences, post.tokens, config.window_words);
      result.highlights.push_back(std::move(h));
    }
  }
  if (config.merge_overlaps) result.highlights = merge_overlapping(std::move(result.highlights), post.text);
  result.highlights = dedup_highlights(std::move(result.highlights), config.keep_duplicates);
  result.important_sentences.assign(important.begin(), important.end());
  return result;
}

}  // namespace riskev::evidence
