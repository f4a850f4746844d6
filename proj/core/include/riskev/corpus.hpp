#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskev/text.hpp"

namespace riskev::corpus {

/// Four-level suicide-risk annotation, ordered by severity.
enum class RiskLabel { a = 0, b = 1, c = 2, d = 3 };

std::optional<RiskLabel> parse_risk_label(std::string_view value);
std::string_view to_string(RiskLabel label);

/// a (no risk) -> -1; b, c, d -> +1.
int map_risk_to_binary(RiskLabel label);

struct Post {
  std::string post_id;
  std::string user_id;
  std::string title;
  std::string body;

  /// Text that downstream stages see. A non-empty title becomes its own
  /// paragraph in front of the body, so offsets are relative to this string.
  std::string text(bool include_title) const;
};

struct UserRecord {
  std::string user_id;
  RiskLabel label = RiskLabel::a;
  std::vector<Post> posts;
};

struct Corpus {
  std::vector<UserRecord> users;
  std::vector<std::string> warnings;

  std::size_t post_count() const;
  const UserRecord* find_user(std::string_view user_id) const;
};

enum class CorpusFormat { jsonl, csv };

/// Picks the format from the file extension (.csv, otherwise JSONL).
CorpusFormat format_for(const std::filesystem::path& path);

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_jsonl(std::istream& in);
Corpus parse_csv(std::istream& in);

/// One JSONL line (no trailing newline) in the corpus schema.
std::string to_jsonl(const UserRecord& user);
void save_jsonl(const Corpus& corpus, const std::filesystem::path& path);

/// [start, end) in Unicode scalar indices plus the verbatim substring.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;

  std::size_t length() const noexcept { return end - start; }
  bool contains(std::size_t pos) const noexcept { return pos >= start && pos < end; }
  friend bool operator==(const Span&, const Span&) = default;
};

using TokenSpan = Span;

struct Sentence {
  Span span;
  std::size_t index = 0;
};

/// Maximal matches of \b[^\d\W]+\b: runs of word characters that contain no
/// decimal digit. Case is preserved.
std::vector<TokenSpan> word_tokenize(const IndexedText& text);
std::vector<TokenSpan> word_tokenize(std::string_view utf8);

struct SentenceSplitOptions {
  /// Lowercase abbreviations without the final period ("dr", "e.g").
  std::vector<std::string> abbreviations = default_abbreviations();

  static std::vector<std::string> default_abbreviations();
};

/// Rule-based segmentation on runs of . ! ? (plus closing quotes/brackets)
/// followed by whitespace, and on blank lines. Sentences are trimmed, ordered,
/// non-overlapping and together cover every non-whitespace character.
std::vector<Sentence> split_sentences(const IndexedText& text, const SentenceSplitOptions& options = {});
std::vector<Sentence> split_sentences(std::string_view utf8, const SentenceSplitOptions& options = {});

/// A text together with its tokens and sentences, computed once.
struct AnnotatedText {
  IndexedText text;
  std::vector<TokenSpan> tokens;
  std::vector<Sentence> sentences;

  explicit AnnotatedText(std::string utf8, const SentenceSplitOptions& options = {});

  /// Index of the sentence containing `pos`, if any.
  std::optional<std::size_t> sentence_at(std::size_t pos) const;
};

}  // namespace riskev::corpus
