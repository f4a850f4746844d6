#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskev/corpus.hpp"
#include "riskev/evidence.hpp"

namespace riskev::llm {

/// Highlight-extraction prompt; {post_body} is replaced by the post text.
inline constexpr std::string_view kHighlightPrompt =
    "Provide sequences of text that indicate that this person is suicidal?\n\nPost Body: {post_body}";

/// Summary prompt; {content_body} is replaced by the posts or important sentences.
inline constexpr std::string_view kSummaryPrompt =
    "As a psychologist and expert therapist, summarize the content by identifying any indications of suicidal "
    "thoughts. Provide evidence from the text to support your analysis.\n\nPost Body: {content_body}\n\nAnalysis:";

/// Substitutes every occurrence of `placeholder` (including braces) in `tmpl`.
std::string render_prompt(std::string_view tmpl, std::string_view placeholder, std::string_view value);

struct LlmParams {
  /// Base URL; requests go to {endpoint}/v1/chat/completions.
  std::string endpoint = "http://127.0.0.1:8080";
  std::string model = "openhermes-2.5-mistral-7b.Q4_K_M";
  std::string api_key;
  double temperature = 0.75;
  double top_p = 1.0;
  std::size_t context_size = 32000;
  std::size_t max_tokens = 1024;
  std::size_t n_runs = 8;
  std::chrono::milliseconds timeout{std::chrono::seconds(600)};
  std::size_t max_retries = 3;
  std::chrono::milliseconds initial_backoff{std::chrono::milliseconds(500)};
  std::size_t concurrency = 1;
  /// Optional JSONL audit log of every request/response pair.
  std::optional<std::filesystem::path> audit_log;
  std::string highlight_prompt = std::string(kHighlightPrompt);
  std::string summary_prompt = std::string(kSummaryPrompt);

  void validate() const;
};

struct TokenUsage {
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  std::size_t total_tokens = 0;
};

struct LlmResponse {
  std::string text;
  std::size_t run_index = 0;
  std::chrono::milliseconds latency{0};
  std::optional<TokenUsage> usage;
  std::size_t retries = 0;
};

/// Anything that turns a prompt into one completion. Implementations must be
/// safe to call from several threads.
class ChatModel {
 public:
  virtual ~ChatModel() = default;
  virtual LlmResponse complete(std::string_view prompt, std::size_t run_index) = 0;
};

/// OpenAI-compatible chat/completions client over HTTP.
///
/// Transient failures (connection errors, timeouts, 429 and 5xx) are retried
/// with exponential backoff up to max_retries; other statuses and malformed
/// bodies fail immediately. At most `concurrency` requests are in flight.
class HttpChatClient final : public ChatModel {
 public:
  explicit HttpChatClient(LlmParams params);
  ~HttpChatClient() override;

  LlmResponse complete(std::string_view prompt, std::size_t run_index) override;

  const LlmParams& params() const noexcept { return params_; }
  std::size_t requests_sent() const;

 private:
  LlmResponse attempt(const std::string& body, std::size_t run_index);
  void audit(const std::string& request, const std::string& response, std::size_t run_index, int status);

  LlmParams params_;
  std::counting_semaphore<1024> slots_;
  mutable std::mutex mutex_;
  std::size_t requests_ = 0;
  std::unique_ptr<std::ofstream> audit_;
};

/// One completion with a throwaway client.
LlmResponse chat_completion(const LlmParams& params, std::string_view prompt, std::size_t run_index = 0);

/// Cuts `text` so the rendered prompt fits the context window, estimating four
/// characters per token. Returns whether anything was removed.
bool truncate_to_context(std::string& text, const LlmParams& params, std::string_view tmpl);

struct Candidate {
  std::string text;
  std::size_t run_index = 0;
};

struct ExtractionResult {
  std::vector<Candidate> candidates;
  std::size_t runs_succeeded = 0;
  std::vector<std::string> run_errors;
  bool truncated = false;
};

/// Runs the highlight prompt n_runs times and parses quoted spans from each
/// response. Fewer than half the runs succeeding is an EndpointError listing
/// each run's failure; otherwise failed runs become warnings in run_errors.
ExtractionResult llm_extract_highlights(ChatModel& model, std::string_view post_body, const LlmParams& params);

/// Text between matching "..." or “...” pairs, in order. An unbalanced
/// trailing quote is ignored, as are empty quotations.
std::vector<std::string> parse_quoted(std::string_view response);

struct Verification {
  std::vector<corpus::Span> spans;
  std::size_t dropped = 0;
};

/// Keeps candidates that occur in the text: exact match first, then a match
/// ignoring case and collapsing whitespace. Each kept candidate becomes the
/// verbatim span of its first occurrence.
Verification verify_in_text(std::span<const std::string> candidates, const IndexedText& text);

struct LlmPostEvidence {
  std::vector<evidence::Highlight> highlights;
  std::size_t candidates = 0;
  std::size_t dropped = 0;
  std::vector<std::string> warnings;
};

/// Extraction, quote parsing, verification and deduplication for one post.
LlmPostEvidence llm_highlight_post(ChatModel& model, std::string_view user_id, std::string_view post_id,
                                   const IndexedText& text, const LlmParams& params, bool keep_duplicates);

}  // namespace riskev::llm
