#include "riskev/eval.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "riskev/corpus.hpp"
#include "riskev/error.hpp"
#include "riskev/hash.hpp"
#include "riskev/text.hpp"

namespace riskev::eval {

using json = nlohmann::json;

std::vector<double> Embedder::embed(std::string_view text) {
  const std::string t(text);
  return embed_batch(std::span<const std::string>(&t, 1)).at(0);
}

HashedTrigramEmbedder::HashedTrigramEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw DataError("embedder dimension must be positive");
}

std::vector<double> HashedTrigramEmbedder::embed_one(std::string_view text) const {
  std::vector<double> v(dimension_, 0.0);
  bool any = false;
  for (const auto& tok : corpus::word_tokenize(text)) {
    std::u32string padded = U"#" + decode_utf8(to_lower(tok.text)) + U"#";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
      const auto gram = encode_utf8(std::u32string_view(padded).substr(i, 3));
      v[fnv1a64(gram) % dimension_] += 1.0;
      any = true;
    }
  }
  if (!any) v[fnv1a64("<empty>") % dimension_] = 1.0;
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::vector<std::vector<double>> HashedTrigramEmbedder::embed_batch(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

std::vector<double> test_embedder(std::string_view text) { return HashedTrigramEmbedder().embed_one(text); }

namespace {

json post_json(const HttpEndpoint& endpoint, const json& request) {
  const auto scheme = endpoint.url.find("://");
  const auto path_at = endpoint.url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  const std::string origin = path_at == std::string::npos ? endpoint.url : endpoint.url.substr(0, path_at);
  const std::string path = path_at == std::string::npos ? "/" : endpoint.url.substr(path_at);
  const std::string body = request.dump(-1, ' ', false, json::error_handler_t::replace);

  httplib::Headers headers;
  if (!endpoint.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint.api_key);
  auto backoff = std::chrono::milliseconds(200);
  for (std::size_t retry = 0;; ++retry) {
    httplib::Client client(origin);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path, headers, body, "application/json");
    const bool transient = !res || res->status == 429 || res->status >= 500;
    if (res && res->status >= 200 && res->status < 300) {
      auto parsed = json::parse(res->body, nullptr, false);
      if (parsed.is_discarded()) throw MalformedResponseError("endpoint " + endpoint.url + " returned invalid JSON");
      return parsed;
    }
    if (!transient || retry >= endpoint.max_retries) {
      if (!res) {
        if (res.error() == httplib::Error::ConnectionTimeout || res.error() == httplib::Error::Read) {
          throw TimeoutError("endpoint " + endpoint.url + ": " + httplib::to_string(res.error()));
        }
        throw EndpointError("endpoint " + endpoint.url + ": " + httplib::to_string(res.error()));
      }
      throw HttpStatusError(res->status, "endpoint " + endpoint.url + " returned HTTP " + std::to_string(res->status));
    }
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
}

}  // namespace

HttpEmbedder::HttpEmbedder(HttpEndpoint endpoint, std::size_t batch_size)
    : endpoint_(std::move(endpoint)), batch_size_(std::max<std::size_t>(1, batch_size)) {}

std::vector<std::vector<double>> HttpEmbedder::embed_batch(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (std::size_t begin = 0; begin < texts.size(); begin += batch_size_) {
    const auto chunk = texts.subspan(begin, std::min(batch_size_, texts.size() - begin));
    const auto response = post_json(endpoint_, json{{"texts", std::vector<std::string>(chunk.begin(), chunk.end())}});
    try {
      const auto vectors = response.at("vectors").get<std::vector<std::vector<double>>>();
      if (vectors.size() != chunk.size()) throw MalformedResponseError("embedding endpoint returned wrong vector count");
      for (auto v : vectors) {
        if (!out.empty() && v.size() != out.front().size()) {
          throw MalformedResponseError("embedding endpoint returned vectors of different dimensions");
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (!(norm > 0.0) || !std::isfinite(norm)) throw MalformedResponseError("embedding endpoint returned a zero or non-finite vector");
        for (double& x : v) x /= norm;
        out.push_back(std::move(v));
      }
    } catch (const json::exception& e) {
      throw MalformedResponseError(std::string("embedding response: ") + e.what());
    }
  }
  return out;
}

HttpNliClient::HttpNliClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

NliJudgement HttpNliClient::judge(std::string_view premise, std::string_view hypothesis) {
  const auto response = post_json(endpoint_, json{{"premise", premise}, {"hypothesis", hypothesis}});
  try {
    return NliJudgement{response.at("entailment").get<double>(), response.at("neutral").get<double>(),
                        response.at("contradiction").get<double>()};
  } catch (const json::exception& e) {
    throw MalformedResponseError(std::string("NLI response: ") + e.what());
  }
}

double similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("similarity: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return std::clamp(s, 0.0, 1.0);
}

double harmonic(double recall, double precision) {
  const double denom = recall + precision;
  return denom > 0.0 ? 2.0 * recall * precision / denom : 0.0;
}

namespace {

// sim[g][p] for every gold/prediction pair.
using Matrix = std::vector<std::vector<double>>;

Matrix similarity_matrix(std::span<const std::string> gold, std::span<const std::string> pred, Embedder& embedder) {
  std::vector<std::string> texts(gold.begin(), gold.end());
  texts.insert(texts.end(), pred.begin(), pred.end());
  const auto vectors = embedder.embed_batch(texts);
  Matrix m(gold.size(), std::vector<double>(pred.size()));
  for (std::size_t g = 0; g < gold.size(); ++g) {
    for (std::size_t p = 0; p < pred.size(); ++p) m[g][p] = similarity(vectors[g], vectors[gold.size() + p]);
  }
  return m;
}

double recall_from(const Matrix& m) {
  double total = 0.0;
  for (const auto& row : m) total += row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
  return total / static_cast<double>(m.size());
}

double precision_from(const Matrix& m, std::size_t n_pred) {
  if (n_pred == 0 || m.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t p = 0; p < n_pred; ++p) {
    double best = 0.0;
    for (const auto& row : m) best = std::max(best, row[p]);
    total += best;
  }
  return total / static_cast<double>(n_pred);
}

double weighted_from(const Matrix& m, std::span<const std::string> gold, std::span<const std::string> pred) {
  double total = 0.0;
  for (std::size_t g = 0; g < m.size(); ++g) {
    if (m[g].empty()) continue;
    const auto best = static_cast<std::size_t>(std::max_element(m[g].begin(), m[g].end()) - m[g].begin());
    const double gold_words = static_cast<double>(std::max<std::size_t>(1, corpus::word_tokenize(gold[g]).size()));
    const double pred_words = static_cast<double>(std::max<std::size_t>(1, corpus::word_tokenize(pred[best]).size()));
    total += m[g][best] * std::min(1.0, gold_words / pred_words);
  }
  return total / static_cast<double>(m.size());
}

void require_gold(std::span<const std::string> gold) {
  if (gold.empty()) throw DataError("highlight metrics: gold highlights are empty");
}

}  // namespace

double highlight_recall(std::span<const std::string> gold, std::span<const std::string> pred, Embedder& embedder) {
  require_gold(gold);
  return recall_from(similarity_matrix(gold, pred, embedder));
}

double highlight_precision(std::span<const std::string> gold, std::span<const std::string> pred, Embedder& embedder) {
  if (pred.empty() || gold.empty()) return 0.0;
  return precision_from(similarity_matrix(gold, pred, embedder), pred.size());
}

double weighted_recall(std::span<const std::string> gold, std::span<const std::string> pred, Embedder& embedder) {
  require_gold(gold);
  return weighted_from(similarity_matrix(gold, pred, embedder), gold, pred);
}

HighlightScores score_highlights(std::span<const std::string> gold, std::span<const std::string> pred,
                                 Embedder& embedder) {
  require_gold(gold);
  const auto m = similarity_matrix(gold, pred, embedder);
  HighlightScores s;
  s.recall = recall_from(m);
  s.precision = precision_from(m, pred.size());
  s.weighted_recall = weighted_from(m, gold, pred);
  s.harmonic = harmonic(s.recall, s.precision);
  return s;
}

SummaryScores summary_scores(std::span<const std::string> gold_sentences, std::string_view pred_summary,
                             NliClient& nli) {
  if (gold_sentences.empty()) throw DataError("summary metrics: gold sentences are empty");
  const auto hypotheses = corpus::split_sentences(pred_summary);
  if (hypotheses.empty()) throw DataError("summary metrics: predicted summary is empty");

  double contradiction = 0.0;
  for (std::size_t g = 0; g < gold_sentences.size(); ++g) {
    double worst = 0.0;
    for (std::size_t h = 0; h < hypotheses.size(); ++h) {
      NliJudgement j;
      try {
        j = nli.judge(gold_sentences[g], hypotheses[h].span.text);
      } catch (const EndpointError& e) {
        throw EndpointError("NLI failed for gold sentence " + std::to_string(g) + ", summary sentence " +
                            std::to_string(h) + ": " + e.what());
      }
      const double sum = j.entailment + j.neutral + j.contradiction;
      if (j.entailment < 0 || j.neutral < 0 || j.contradiction < 0 || std::abs(sum - 1.0) > 1e-6) {
        throw MalformedResponseError("NLI probabilities must be non-negative and sum to 1");
      }
      worst = std::max(worst, j.contradiction);
    }
    contradiction += worst;
  }
  contradiction /= static_cast<double>(gold_sentences.size());
  return SummaryScores{1.0 - contradiction, contradiction};
}

}  // namespace riskev::eval
