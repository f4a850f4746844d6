#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace riskev::eval {

/// Maps texts to unit vectors of a fixed dimension. Implementations must be
/// deterministic per text.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) = 0;
  std::vector<double> embed(std::string_view text);
};

/// Hashed bag of character trigrams of the lowercased regex tokens (each
/// token padded with '#'), L2-normalized. Counts are non-negative, so cosine
/// similarities lie in [0, 1]. A deterministic stand-in for a neural encoder.
class HashedTrigramEmbedder final : public Embedder {
 public:
  explicit HashedTrigramEmbedder(std::size_t dimension = 4096);
  std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) override;
  std::vector<double> embed_one(std::string_view text) const;
  std::size_t dimension() const noexcept { return dimension_; }

 private:
  std::size_t dimension_;
};

/// The default test embedder (4096 buckets).
std::vector<double> test_embedder(std::string_view text);

struct HttpEndpoint {
  /// Full URL the request is POSTed to.
  std::string url;
  std::string api_key;
  std::chrono::milliseconds timeout{std::chrono::seconds(120)};
  std::size_t max_retries = 2;
};

/// POST {"texts": [...]} -> {"vectors": [[...], ...]}; vectors are re-normalized.
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(HttpEndpoint endpoint, std::size_t batch_size = 64);
  std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) override;

 private:
  HttpEndpoint endpoint_;
  std::size_t batch_size_;
};

struct NliJudgement {
  double entailment = 0.0;
  double neutral = 0.0;
  double contradiction = 0.0;
};

class NliClient {
 public:
  virtual ~NliClient() = default;
  virtual NliJudgement judge(std::string_view premise, std::string_view hypothesis) = 0;
};

/// POST {"premise": ..., "hypothesis": ...} ->
/// {"entailment": p, "neutral": p, "contradiction": p}.
class HttpNliClient final : public NliClient {
 public:
  explicit HttpNliClient(HttpEndpoint endpoint);
  NliJudgement judge(std::string_view premise, std::string_view hypothesis) override;

 private:
  HttpEndpoint endpoint_;
};

struct HighlightScores {
  double recall = 0.0;
  double precision = 0.0;
  double weighted_recall = 0.0;
  double harmonic = 0.0;
};

struct SummaryScores {
  double consistency = 0.0;
  double contradiction = 0.0;
};

/// Cosine of two unit vectors clamped to [0, 1].
double similarity(std::span<const double> a, std::span<const double> b);

/// Mean over gold of the best similarity to any prediction; 0 with no
/// predictions. Throws DataError on empty gold.
double highlight_recall(std::span<const std::string> gold, std::span<const std::string> pred, Embedder& embedder);
/// Mean over predictions of the best similarity to any gold highlight; 0 with
/// no predictions.
double highlight_precision(std::span<const std::string> gold, std::span<const std::string> pred, Embedder& embedder);
/// Recall where each gold highlight's best similarity is scaled by
/// min(1, words(gold) / words(best prediction)), penalizing long highlights.
double weighted_recall(std::span<const std::string> gold, std::span<const std::string> pred, Embedder& embedder);
/// 2rp / (r + p), 0 when both are 0.
double harmonic(double recall, double precision);

/// All four highlight scores from a single embedding pass.
HighlightScores score_highlights(std::span<const std::string> gold, std::span<const std::string> pred,
                                 Embedder& embedder);

/// Gold sentences are premises, sentences of the predicted summary are
/// hypotheses. contradiction = mean over gold of the max contradiction
/// probability over predicted sentences; consistency = mean of 1 - that max.
SummaryScores summary_scores(std::span<const std::string> gold_sentences, std::string_view pred_summary,
                             NliClient& nli);

}  // namespace riskev::eval
