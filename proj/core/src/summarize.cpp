#include "riskev/summarize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

#include "riskev/corpus.hpp"
#include "riskev/error.hpp"
#include "riskev/hash.hpp"
#include "riskev/text.hpp"

namespace riskev::summarize {

std::string_view to_string(SummaryMode mode) { return mode == SummaryMode::extractive ? "extractive" : "abstractive"; }

std::optional<SummaryMode> parse_summary_mode(std::string_view value) {
  if (value == "extractive") return SummaryMode::extractive;
  if (value == "abstractive") return SummaryMode::abstractive;
  return std::nullopt;
}

void SummaryConfig::validate() const {
  if (!(damping > 0.0 && damping < 1.0)) throw DataError("summary: damping must be in (0, 1)");
  if (n_sentences < 1) throw DataError("summary: n_sentences must be >= 1");
  if (!(convergence_eps > 0.0)) throw DataError("summary: convergence_eps must be > 0");
  if (max_iterations < 1) throw DataError("summary: max_iterations must be >= 1");
}

namespace {

const std::unordered_set<std::string>& function_words() {
  static const std::unordered_set<std::string> words = {
      "a",     "an",    "and",   "are",  "as",    "at",   "be",    "been",  "but",   "by",    "can",  "could",
      "did",   "do",    "does",  "for",  "from",  "had",  "has",   "have",  "he",    "her",   "him",  "his",
      "i",     "if",    "in",    "into", "is",    "it",   "its",   "just",  "me",    "my",    "no",   "not",
      "of",    "on",    "or",    "our",  "she",   "so",   "than",  "that",  "the",   "their", "them", "then",
      "there", "these", "they",  "this", "those", "to",   "too",   "up",    "us",    "very",  "was",  "we",
      "were",  "what",  "when",  "which", "who",  "will", "with",  "would", "you",   "your",  "am",   "t",
      "s",     "m",     "ve",    "ll",   "re",    "d",    "don",   "all",   "any",   "out",   "about"};
  return words;
}

}  // namespace

std::vector<std::string> content_words(std::string_view sentence) {
  std::vector<std::string> out;
  for (const auto& tok : corpus::word_tokenize(sentence)) {
    auto w = to_lower(tok.text);
    if (!function_words().count(w)) out.push_back(std::move(w));
  }
  return out;
}

double sentence_similarity(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0.0;
  const double denom = std::log(static_cast<double>(a.size())) + std::log(static_cast<double>(b.size()));
  if (!(denom > 0.0)) return 0.0;
  const std::set<std::string> sa(a.begin(), a.end());
  std::set<std::string> shared;
  for (const auto& w : b) {
    if (sa.count(w)) shared.insert(w);
  }
  return static_cast<double>(shared.size()) / denom;
}

TextRankResult textrank(std::span<const std::string> sentences, const SummaryConfig& config) {
  config.validate();
  const std::size_t n = sentences.size();
  if (n == 0) throw DataError("textrank: no sentences");
  TextRankResult result;
  if (n == 1) {
    result.ranking.push_back(RankedSentence{0, 1.0, 1.0 - config.damping});
    result.converged = true;
    return result;
  }

  std::vector<std::vector<std::string>> words(n);
  for (std::size_t i = 0; i < n; ++i) words[i] = content_words(sentences[i]);
  std::vector<double> weight(n * n, 0.0);
  std::vector<double> out_weight(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = sentence_similarity(words[i], words[j]);
      weight[i * n + j] = weight[j * n + i] = w;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) out_weight[j] += weight[j * n + k];
  }

  const double d = config.damping;
  std::vector<double> score(n, 1.0), next(n);
  auto normalized_change = [&] {
    const double s_old = std::accumulate(score.begin(), score.end(), 0.0);
    const double s_new = std::accumulate(next.begin(), next.end(), 0.0);
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(next[i] / s_new - score[i] / s_old));
    return delta;
  };
  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double incoming = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double w = weight[j * n + i];
        if (w > 0.0) incoming += w / out_weight[j] * score[j];
      }
      next[i] = (1.0 - d) + d * incoming;
    }
    const double delta = normalized_change();
    score.swap(next);
    result.iterations = iter + 1;
    if (delta < config.convergence_eps) {
      result.converged = true;
      break;
    }
  }

  const double total = std::accumulate(score.begin(), score.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) result.ranking.push_back(RankedSentence{i, score[i] / total, score[i]});
  std::stable_sort(result.ranking.begin(), result.ranking.end(),
                   [](const RankedSentence& a, const RankedSentence& b) { return a.score > b.score; });
  return result;
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char32_t c : decode_utf8(text)) {
    const bool space = is_space(c);
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

std::string truncate_words(std::string_view text, std::size_t max_words) {
  const IndexedText indexed{std::string(text)};
  const auto chars = indexed.chars();
  std::size_t count = 0;
  bool in_word = false;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const bool space = is_space(chars[i]);
    if (!space && !in_word) {
      if (count == max_words) {
        std::size_t end = i;
        while (end > 0 && is_space(chars[end - 1])) --end;
        return indexed.slice(0, end);
      }
      ++count;
    }
    in_word = !space;
  }
  return std::string(text);
}

Summary extractive_summary(std::span<const std::string> important_sentences, const SummaryConfig& config) {
  config.validate();
  Summary summary;
  summary.mode = SummaryMode::extractive;
  if (important_sentences.empty()) {
    summary.warnings.emplace_back("no important sentences; extractive summary is empty");
    return summary;
  }
  const auto ranked = textrank(important_sentences, config);
  if (!ranked.converged) summary.warnings.emplace_back("textrank did not converge");

  std::vector<std::size_t> chosen;
  for (std::size_t k = 0; k < ranked.ranking.size() && k < config.n_sentences; ++k) {
    chosen.push_back(ranked.ranking[k].index);
  }
  std::sort(chosen.begin(), chosen.end());
  while (!chosen.empty()) {
    std::size_t words = 0;
    for (auto i : chosen) words += word_count(important_sentences[i]);
    if (words <= config.max_words) break;
    chosen.pop_back();
  }
  if (chosen.empty()) summary.warnings.emplace_back("every candidate sentence exceeds max_words");
  for (auto i : chosen) {
    if (!summary.text.empty()) summary.text.push_back(' ');
    summary.text += important_sentences[i];
  }
  summary.source_sentences = std::move(chosen);
  return summary;
}

Summary abstractive_summary(llm::ChatModel& model, std::string_view content_body, const SummaryConfig& config,
                            std::string_view prompt_template) {
  config.validate();
  if (content_body.empty()) throw DataError("summary: content body is empty");
  const auto prompt = llm::render_prompt(prompt_template, "{content_body}", content_body);
  const auto response = model.complete(prompt, 0);

  const auto decoded = decode_utf8(response.text);
  std::size_t b = 0, e = decoded.size();
  while (b < e && is_space(decoded[b])) ++b;
  while (e > b && is_space(decoded[e - 1])) --e;
  if (b == e) throw EndpointError("summary: model returned an empty response");

  Summary summary;
  summary.mode = SummaryMode::abstractive;
  summary.text = encode_utf8(std::u32string_view(decoded).substr(b, e - b));
  summary.prompt_fingerprint = to_hex(fnv1a64(prompt));
  if (word_count(summary.text) > config.max_words) {
    summary.text = truncate_words(summary.text, config.max_words);
    summary.warnings.emplace_back("summary truncated to " + std::to_string(config.max_words) + " words");
  }
  return summary;
}

}  // namespace riskev::summarize
