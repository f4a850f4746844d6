#include "riskev/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "riskev/error.hpp"

namespace riskev::corpus {

using json = nlohmann::json;

std::optional<RiskLabel> parse_risk_label(std::string_view value) {
  if (value == "a") return RiskLabel::a;
  if (value == "b") return RiskLabel::b;
  if (value == "c") return RiskLabel::c;
  if (value == "d") return RiskLabel::d;
  return std::nullopt;
}

std::string_view to_string(RiskLabel label) {
  switch (label) {
    case RiskLabel::a: return "a";
    case RiskLabel::b: return "b";
    case RiskLabel::c: return "c";
    case RiskLabel::d: return "d";
  }
  return "?";
}

int map_risk_to_binary(RiskLabel label) { return label == RiskLabel::a ? -1 : +1; }

std::string Post::text(bool include_title) const {
  if (!include_title || title.empty()) return body;
  return title + "\n\n" + body;
}

std::size_t Corpus::post_count() const {
  std::size_t n = 0;
  for (const auto& u : users) n += u.posts.size();
  return n;
}

const UserRecord* Corpus::find_user(std::string_view user_id) const {
  for (const auto& u : users) {
    if (u.user_id == user_id) return &u;
  }
  return nullptr;
}

CorpusFormat format_for(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv" ? CorpusFormat::csv : CorpusFormat::jsonl;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  return format == CorpusFormat::csv ? parse_csv(in) : parse_jsonl(in);
}

Corpus load_corpus(const std::filesystem::path& path) { return load_corpus(path, format_for(path)); }

namespace {

class CorpusBuilder {
 public:
  void add_user(UserRecord user, std::size_t line) {
    if (user.posts.empty()) {
      throw DataError("line " + std::to_string(line) + ": user '" + user.user_id + "' has no posts");
    }
    if (!user_index_.emplace(user.user_id, corpus_.users.size()).second) {
      throw DataError("line " + std::to_string(line) + ": duplicate user_id '" + user.user_id + "'");
    }
    for (const auto& p : user.posts) check_post(p, line);
    corpus_.users.push_back(std::move(user));
  }

  void add_post(const std::string& user_id, RiskLabel label, Post post, std::size_t line) {
    check_post(post, line);
    auto [it, inserted] = user_index_.emplace(user_id, corpus_.users.size());
    if (inserted) {
      corpus_.users.push_back(UserRecord{user_id, label, {}});
    } else if (corpus_.users[it->second].label != label) {
      throw DataError("line " + std::to_string(line) + ": conflicting label for user '" + user_id + "'");
    }
    corpus_.users[it->second].posts.push_back(std::move(post));
  }

  Corpus finish(bool saw_records) {
    if (!saw_records) corpus_.warnings.emplace_back("corpus is empty");
    return std::move(corpus_);
  }

 private:
  void check_post(const Post& p, std::size_t line) {
    if (p.post_id.empty()) throw DataError("line " + std::to_string(line) + ": empty post_id");
    if (!post_ids_.insert(p.post_id).second) {
      throw DataError("line " + std::to_string(line) + ": duplicate post_id '" + p.post_id + "'");
    }
    for (const std::string* field : {&p.title, &p.body, &p.post_id, &p.user_id}) {
      if (!is_valid_utf8(*field)) throw DataError("line " + std::to_string(line) + ": invalid UTF-8");
    }
  }

  Corpus corpus_;
  std::unordered_map<std::string, std::size_t> user_index_;
  std::unordered_set<std::string> post_ids_;
};

RiskLabel require_label(std::string_view value, std::size_t line) {
  auto label = parse_risk_label(value);
  if (!label) {
    throw DataError("line " + std::to_string(line) + ": unknown label value '" + std::string(value) + "'");
  }
  return *label;
}

std::string string_field(const json& obj, const char* key, std::size_t line, bool required) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) throw DataError("line " + std::to_string(line) + ": missing field '" + key + "'");
    return {};
  }
  if (!it->is_string()) {
    throw DataError("line " + std::to_string(line) + ": field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

Corpus parse_jsonl(std::istream& in) {
  CorpusBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  bool saw = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("line " + std::to_string(line_no) + ": malformed record: " + e.what());
    }
    if (!record.is_object()) throw DataError("line " + std::to_string(line_no) + ": malformed record: not an object");
    saw = true;

    UserRecord user;
    user.user_id = string_field(record, "user_id", line_no, true);
    user.label = require_label(string_field(record, "label", line_no, true), line_no);
    auto posts = record.find("posts");
    if (posts == record.end() || !posts->is_array()) {
      throw DataError("line " + std::to_string(line_no) + ": malformed record: 'posts' must be an array");
    }
    for (const auto& p : *posts) {
      if (!p.is_object()) throw DataError("line " + std::to_string(line_no) + ": malformed post entry");
      Post post;
      post.post_id = string_field(p, "post_id", line_no, true);
      post.user_id = user.user_id;
      post.title = string_field(p, "title", line_no, false);
      post.body = string_field(p, "body", line_no, true);
      user.posts.push_back(std::move(post));
    }
    builder.add_user(std::move(user), line_no);
  }
  return builder.finish(saw);
}

namespace {

// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
// newlines. Returns false at end of input.
bool read_csv_row(std::istream& in, std::vector<std::string>& row, std::size_t& line_no) {
  row.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line_no;
      row.push_back(std::move(field));
      return true;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (in_quotes) throw DataError("line " + std::to_string(line_no) + ": unterminated quoted field");
  if (!any) return false;
  row.push_back(std::move(field));
  return true;
}

}  // namespace

Corpus parse_csv(std::istream& in) {
  CorpusBuilder builder;
  std::vector<std::string> row;
  std::size_t line_no = 1;
  std::size_t row_start = 1;
  if (!read_csv_row(in, row, line_no)) return builder.finish(false);

  const std::vector<std::string> required = {"user_id", "label", "post_id", "title", "body"};
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < row.size(); ++i) column[row[i]] = i;
  for (const auto& name : required) {
    if (!column.count(name)) throw DataError("line 1: missing CSV column '" + name + "'");
  }

  bool saw = false;
  row_start = line_no + 1;
  while (read_csv_row(in, row, line_no)) {
    const std::size_t this_row = row_start;
    row_start = line_no + 1;
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != column.size()) {
      throw DataError("line " + std::to_string(this_row) + ": malformed record: expected " +
                      std::to_string(column.size()) + " fields, got " + std::to_string(row.size()));
    }
    saw = true;
    const auto& user_id = row[column["user_id"]];
    if (user_id.empty()) throw DataError("line " + std::to_string(this_row) + ": empty user_id");
    Post post{row[column["post_id"]], user_id, row[column["title"]], row[column["body"]]};
    builder.add_post(user_id, require_label(row[column["label"]], this_row), std::move(post), this_row);
  }
  return builder.finish(saw);
}

std::string to_jsonl(const UserRecord& user) {
  json posts = json::array();
  for (const auto& p : user.posts) {
    posts.push_back({{"post_id", p.post_id}, {"title", p.title}, {"body", p.body}});
  }
  json record = {{"user_id", user.user_id}, {"label", std::string(to_string(user.label))}, {"posts", posts}};
  return record.dump();
}

void save_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& u : corpus.users) out << to_jsonl(u) << '\n';
}

std::vector<TokenSpan> word_tokenize(const IndexedText& text) {
  std::vector<TokenSpan> tokens;
  const auto chars = text.chars();
  std::size_t i = 0;
  while (i < chars.size()) {
    if (!is_word_char(chars[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    bool has_digit = false;
    while (i < chars.size() && is_word_char(chars[i])) {
      has_digit = has_digit || is_decimal_digit(chars[i]);
      ++i;
    }
    // A run containing a digit has no sub-run bounded by \b on both sides.
    if (!has_digit) tokens.push_back(TokenSpan{start, i, text.slice(start, i)});
  }
  return tokens;
}

std::vector<TokenSpan> word_tokenize(std::string_view utf8) { return word_tokenize(IndexedText(std::string(utf8))); }

std::vector<std::string> SentenceSplitOptions::default_abbreviations() {
  return {"mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "e.g", "i.e", "approx", "no"};
}

namespace {

bool is_terminator(char32_t c) { return c == U'.' || c == U'!' || c == U'?' || c == U'\u2026'; }

bool is_closer(char32_t c) {
  return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == U'}' || c == U'\u201D' ||
         c == U'\u2019' || c == U'\u00BB';
}

bool is_horizontal_space(char32_t c) { return c != U'\n' && is_space(c); }

bool is_abbreviation(std::u32string_view chars, std::size_t dot, const std::vector<std::string>& abbreviations) {
  std::size_t b = dot;
  while (b > 0 && (chars[b - 1] == U'.' || (is_word_char(chars[b - 1]) && !is_decimal_digit(chars[b - 1])))) --b;
  if (b == dot) return false;
  const auto word = to_lower(encode_utf8(chars.substr(b, dot - b)));
  return std::find(abbreviations.begin(), abbreviations.end(), word) != abbreviations.end();
}

// True when the newline at `nl` starts a blank line (only horizontal space
// before the next newline).
bool starts_blank_line(std::u32string_view chars, std::size_t nl) {
  for (std::size_t k = nl + 1; k < chars.size(); ++k) {
    if (chars[k] == U'\n') return true;
    if (!is_horizontal_space(chars[k])) return false;
  }
  return false;
}

}  // namespace

std::vector<Sentence> split_sentences(const IndexedText& text, const SentenceSplitOptions& options) {
  std::vector<Sentence> sentences;
  const auto chars = text.chars();
  const std::size_t n = chars.size();
  std::size_t i = 0;
  while (true) {
    while (i < n && is_space(chars[i])) ++i;
    if (i == n) break;
    const std::size_t start = i;
    std::size_t end = n;
    std::size_t j = start;
    while (j < n) {
      const char32_t c = chars[j];
      if (c == U'\n' && starts_blank_line(chars, j)) {
        end = j;
        break;
      }
      if (!is_terminator(c)) {
        ++j;
        continue;
      }
      std::size_t run_end = j;
      while (run_end < n && is_terminator(chars[run_end])) ++run_end;
      std::size_t k = run_end;
      while (k < n && is_closer(chars[k])) ++k;
      const bool boundary = k == n || is_space(chars[k]);
      const bool single_period = c == U'.' && run_end - j == 1;
      if (boundary && !(single_period && is_abbreviation(chars, j, options.abbreviations))) {
        end = k;
        break;
      }
      j = k;
    }
    while (end > start && is_space(chars[end - 1])) --end;
    sentences.push_back(Sentence{Span{start, end, text.slice(start, end)}, sentences.size()});
    i = end;
  }
  return sentences;
}

std::vector<Sentence> split_sentences(std::string_view utf8, const SentenceSplitOptions& options) {
  return split_sentences(IndexedText(std::string(utf8)), options);
}

AnnotatedText::AnnotatedText(std::string utf8, const SentenceSplitOptions& options)
    : text(std::move(utf8)), tokens(word_tokenize(text)), sentences(split_sentences(text, options)) {}

std::optional<std::size_t> AnnotatedText::sentence_at(std::size_t pos) const {
  auto it = std::upper_bound(sentences.begin(), sentences.end(), pos,
                             [](std::size_t p, const Sentence& s) { return p < s.span.start; });
  if (it == sentences.begin()) return std::nullopt;
  --it;
  if (!it->span.contains(pos)) return std::nullopt;
  return it->index;
}

}  // namespace riskev::corpus
