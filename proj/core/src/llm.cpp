#include "riskev/llm.hpp"

#include <unicode/uchar.h>

#include <algorithm>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "riskev/error.hpp"
#include "riskev/parallel.hpp"
#include "riskev/text.hpp"

namespace riskev::llm {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string render_prompt(std::string_view tmpl, std::string_view placeholder, std::string_view value) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto hit = tmpl.find(placeholder, pos);
    if (hit == std::string_view::npos) break;
    out.append(tmpl.substr(pos, hit - pos));
    out.append(value);
    pos = hit + placeholder.size();
  }
  out.append(tmpl.substr(pos));
  return out;
}

void LlmParams::validate() const {
  if (!(temperature >= 0.0)) throw DataError("llm: temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw DataError("llm: top_p must be in (0, 1]");
  if (n_runs < 1) throw DataError("llm: n_runs must be >= 1");
  if (concurrency < 1 || concurrency > 1024) throw DataError("llm: concurrency must be in [1, 1024]");
  if (endpoint.empty()) throw DataError("llm: endpoint is required");
}

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path_prefix;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  Endpoint e;
  e.origin = path == std::string::npos ? url : url.substr(0, path);
  e.path_prefix = path == std::string::npos ? "" : url.substr(path);
  while (!e.path_prefix.empty() && e.path_prefix.back() == '/') e.path_prefix.pop_back();
  return e;
}

bool transient_status(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpChatClient::HttpChatClient(LlmParams params)
    : params_(std::move(params)), slots_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, params_.concurrency))) {
  params_.validate();
  if (params_.audit_log) {
    audit_ = std::make_unique<std::ofstream>(*params_.audit_log, std::ios::app);
    if (!*audit_) throw DataError("cannot open audit log " + params_.audit_log->string());
  }
}

HttpChatClient::~HttpChatClient() = default;

std::size_t HttpChatClient::requests_sent() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

void HttpChatClient::audit(const std::string& request, const std::string& response, std::size_t run_index,
                           int status) {
  if (!audit_) return;
  json line = {{"run_index", run_index}, {"status", status}, {"request", json::parse(request, nullptr, false)}};
  auto parsed = json::parse(response, nullptr, false);
  line["response"] = parsed.is_discarded() ? json(response) : parsed;
  std::lock_guard lock(mutex_);
  *audit_ << line.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  audit_->flush();
}

LlmResponse HttpChatClient::attempt(const std::string& body, std::size_t run_index) {
  const auto endpoint = split_endpoint(params_.endpoint);
  httplib::Client client(endpoint.origin);
  const auto timeout_us = std::chrono::duration_cast<std::chrono::microseconds>(params_.timeout);
  client.set_connection_timeout(timeout_us);
  client.set_read_timeout(timeout_us);
  client.set_write_timeout(timeout_us);
  httplib::Headers headers;
  if (!params_.api_key.empty()) headers.emplace("Authorization", "Bearer " + params_.api_key);

  {
    std::lock_guard lock(mutex_);
    ++requests_;
  }
  const auto started = Clock::now();
  auto res = client.Post(endpoint.path_prefix + "/v1/chat/completions", headers, body, "application/json");
  const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);

  if (!res) {
    const auto err = res.error();
    audit(body, httplib::to_string(err), run_index, 0);
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && latency + std::chrono::milliseconds(50) >= params_.timeout)) {
      throw TimeoutError("request timed out after " + std::to_string(latency.count()) + " ms");
    }
    throw EndpointError("transport error: " + httplib::to_string(err));
  }
  audit(body, res->body, run_index, res->status);
  if (res->status < 200 || res->status >= 300) {
    throw HttpStatusError(res->status, "endpoint returned HTTP " + std::to_string(res->status));
  }

  LlmResponse out;
  out.run_index = run_index;
  out.latency = latency;
  try {
    const auto j = json::parse(res->body);
    const auto& choice = j.at("choices").at(0);
    if (choice.contains("message")) {
      out.text = choice.at("message").at("content").get<std::string>();
    } else {
      out.text = choice.at("text").get<std::string>();
    }
    if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
      out.usage = TokenUsage{u->value("prompt_tokens", std::size_t{0}), u->value("completion_tokens", std::size_t{0}),
                             u->value("total_tokens", std::size_t{0})};
    }
  } catch (const json::exception& e) {
    throw MalformedResponseError(std::string("malformed chat completion response: ") + e.what());
  }
  return out;
}

LlmResponse HttpChatClient::complete(std::string_view prompt, std::size_t run_index) {
  const json request = {{"model", params_.model},
                        {"messages", json::array({{{"role", "user"}, {"content", std::string(prompt)}}})},
                        {"temperature", params_.temperature},
                        {"top_p", params_.top_p},
                        {"max_tokens", params_.max_tokens}};
  const std::string body = request.dump(-1, ' ', false, json::error_handler_t::replace);

  auto backoff = params_.initial_backoff;
  for (std::size_t retry = 0;; ++retry) {
    try {
      // Hold a slot only while a request is in flight, not while backing off.
      slots_.acquire();
      struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
      } release{slots_};
      auto response = attempt(body, run_index);
      response.retries = retry;
      return response;
    } catch (const HttpStatusError& e) {
      if (!transient_status(e.status()) || retry >= params_.max_retries) throw;
    } catch (const MalformedResponseError&) {
      throw;
    } catch (const EndpointError&) {
      if (retry >= params_.max_retries) throw;
    }
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
}

LlmResponse chat_completion(const LlmParams& params, std::string_view prompt, std::size_t run_index) {
  HttpChatClient client(params);
  return client.complete(prompt, run_index);
}

bool truncate_to_context(std::string& text, const LlmParams& params, std::string_view tmpl) {
  constexpr std::size_t kCharsPerToken = 4;
  const std::size_t overhead = (tmpl.size() + kCharsPerToken - 1) / kCharsPerToken;
  if (params.context_size <= params.max_tokens + overhead) return false;
  const std::size_t budget = (params.context_size - params.max_tokens - overhead) * kCharsPerToken;
  IndexedText indexed(text);
  if (indexed.size() <= budget) return false;
  std::size_t cut = budget;
  const auto chars = indexed.chars();
  while (cut > budget / 2 && !is_space(chars[cut])) --cut;
  if (cut <= budget / 2) cut = budget;
  text = indexed.slice(0, cut);
  return true;
}

ExtractionResult llm_extract_highlights(ChatModel& model, std::string_view post_body, const LlmParams& params) {
  params.validate();
  if (post_body.empty()) throw DataError("llm: post body is empty");
  std::string body(post_body);
  ExtractionResult result;
  result.truncated = truncate_to_context(body, params, params.highlight_prompt);
  const std::string prompt = render_prompt(params.highlight_prompt, "{post_body}", body);

  std::vector<std::optional<LlmResponse>> responses(params.n_runs);
  std::vector<std::string> errors(params.n_runs);
  parallel_for(params.n_runs, params.concurrency, [&](std::size_t run) {
    try {
      responses[run] = model.complete(prompt, run);
    } catch (const EndpointError& e) {
      errors[run] = e.what();
    }
  });

  std::string causes;
  for (std::size_t run = 0; run < params.n_runs; ++run) {
    if (!responses[run]) {
      result.run_errors.push_back("run " + std::to_string(run) + ": " + errors[run]);
      causes += (causes.empty() ? "" : "; ") + result.run_errors.back();
      continue;
    }
    ++result.runs_succeeded;
    for (auto& quoted : parse_quoted(responses[run]->text)) result.candidates.push_back(Candidate{std::move(quoted), run});
  }
  if (2 * result.runs_succeeded < params.n_runs) {
    throw EndpointError(std::to_string(params.n_runs - result.runs_succeeded) + " of " + std::to_string(params.n_runs) +
                        " runs failed: " + causes);
  }
  return result;
}

std::vector<std::string> parse_quoted(std::string_view response) {
  const auto chars = decode_utf8(response);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < chars.size()) {
    char32_t closer = 0;
    switch (chars[i]) {
      case U'"': closer = U'"'; break;
      case U'“': closer = U'”'; break;
      case U'”': closer = U'”'; break;
      default: ++i; continue;
    }
    const auto close = chars.find(closer, i + 1);
    if (close == std::u32string::npos) break;
    const auto inner = std::u32string_view(chars).substr(i + 1, close - i - 1);
    if (std::any_of(inner.begin(), inner.end(), [](char32_t c) { return !is_space(c); })) {
      out.push_back(encode_utf8(inner));
    }
    i = close + 1;
  }
  return out;
}

namespace {

std::u32string_view trim(std::u32string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Case-folded, whitespace-collapsed view of a text with a map back to the
// original scalar index of every kept character.
struct FoldedText {
  std::u32string chars;
  std::vector<std::size_t> origin;
};

FoldedText fold(std::u32string_view s) {
  FoldedText f;
  bool pending_space = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (is_space(s[i])) {
      pending_space = !f.chars.empty();
      continue;
    }
    if (pending_space) {
      f.chars.push_back(U' ');
      f.origin.push_back(i - 1);
      pending_space = false;
    }
    f.chars.push_back(static_cast<char32_t>(u_foldCase(static_cast<UChar32>(s[i]), U_FOLD_CASE_DEFAULT)));
    f.origin.push_back(i);
  }
  return f;
}

}  // namespace

Verification verify_in_text(std::span<const std::string> candidates, const IndexedText& text) {
  Verification v;
  std::optional<FoldedText> folded_text;
  for (const auto& raw : candidates) {
    const auto decoded = decode_utf8(raw);
    const auto candidate = trim(decoded);
    if (candidate.empty()) {
      ++v.dropped;
      continue;
    }
    const std::string needle = encode_utf8(candidate);
    if (const auto byte = text.utf8().find(needle); byte != std::string::npos) {
      const auto start = text.char_index(byte);
      const auto end = start + candidate.size();
      v.spans.push_back(corpus::Span{start, end, text.slice(start, end)});
      continue;
    }
    if (!folded_text) folded_text = fold(text.chars());
    const auto folded_candidate = fold(candidate);
    const auto hit = folded_text->chars.find(folded_candidate.chars);
    if (hit == std::u32string::npos) {
      ++v.dropped;
      continue;
    }
    const auto start = folded_text->origin[hit];
    const auto end = folded_text->origin[hit + folded_candidate.chars.size() - 1] + 1;
    v.spans.push_back(corpus::Span{start, end, text.slice(start, end)});
  }
  return v;
}

LlmPostEvidence llm_highlight_post(ChatModel& model, std::string_view user_id, std::string_view post_id,
                                   const IndexedText& text, const LlmParams& params, bool keep_duplicates) {
  LlmPostEvidence out;
  const auto extraction = llm_extract_highlights(model, text.utf8(), params);
  out.warnings = extraction.run_errors;
  if (extraction.truncated) out.warnings.push_back("post " + std::string(post_id) + " truncated to fit the context window");

  std::vector<std::string> texts;
  texts.reserve(extraction.candidates.size());
  for (const auto& c : extraction.candidates) texts.push_back(c.text);
  out.candidates = texts.size();
  const auto verified = verify_in_text(texts, text);
  out.dropped = verified.dropped;

  std::vector<evidence::Highlight> highlights;
  for (const auto& span : verified.spans) {
    highlights.push_back(evidence::Highlight{std::string(user_id), std::string(post_id), span, evidence::Source::llm, {}});
  }
  out.highlights = evidence::dedup_highlights(std::move(highlights), keep_duplicates);
  return out;
}

}  // namespace riskev::llm
