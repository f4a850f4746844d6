#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>

#include <json.hpp>

#include "riskev/error.hpp"
#include "riskev/eval.hpp"
#include "stub_server.hpp"
#include "test_support.hpp"

namespace riskev::eval {
namespace {

using namespace std::chrono_literals;
using Texts = std::vector<std::string>;

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

TEST(TestEmbedder, UnitDeterministicAndDiscriminating) {
  const auto a = test_embedder("I can't take it anymore");
  EXPECT_EQ(a, test_embedder("I can't take it anymore"));
  EXPECT_NEAR(norm(a), 1.0, 1e-12);
  EXPECT_NEAR(similarity(a, a), 1.0, 1e-12);
  EXPECT_NEAR(norm(test_embedder("")), 1.0, 1e-12);
  EXPECT_LT(similarity(test_embedder("xyz qwv"), test_embedder("abc def")), 0.1);
  EXPECT_GT(similarity(test_embedder("I want to die"), test_embedder("want to die")),
            similarity(test_embedder("I want to die"), test_embedder("the weather is nice")));
}

TEST(Harmonic, ReferenceRows) {
  EXPECT_NEAR(harmonic(0.921, 0.888), 0.904, 0.002);
  EXPECT_NEAR(harmonic(0.939, 0.890), 0.914, 0.002);
  EXPECT_NEAR(harmonic(0.935, 0.905), 0.919, 0.002);
  EXPECT_EQ(harmonic(1.0, 0.0), 0.0);
  EXPECT_EQ(harmonic(0.0, 0.0), 0.0);
}

TEST(Harmonic, Bounds) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double r = u(rng), p = u(rng), h = harmonic(r, p);
    EXPECT_LE(h, (r + p) / 2 + 1e-15);
    EXPECT_LE(h, 2 * std::min(r, p) + 1e-15);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, 1.0);
  }
}

TEST(Recall, IdentityEmptyAndErrors) {
  HashedTrigramEmbedder e;
  const Texts gold{"I want to die", "nobody would miss me"};
  EXPECT_NEAR(highlight_recall(gold, gold, e), 1.0, 1e-6);
  EXPECT_NEAR(highlight_precision(gold, gold, e), 1.0, 1e-6);
  EXPECT_NEAR(weighted_recall(gold, gold, e), highlight_recall(gold, gold, e), 1e-12);
  EXPECT_EQ(highlight_recall(gold, Texts{}, e), 0.0);
  EXPECT_EQ(highlight_precision(gold, Texts{}, e), 0.0);
  EXPECT_THROW(highlight_recall(Texts{}, gold, e), DataError);
  EXPECT_NEAR(highlight_precision(gold, Texts{"I want to die"}, e), 1.0, 1e-6);
}

TEST(Precision, UnrelatedPredictionLowersPrecisionOnly) {
  HashedTrigramEmbedder e;
  const Texts gold{"I want to die", "nobody would miss me"};
  Texts pred = gold;
  pred.push_back("the quarterly budget spreadsheet");
  EXPECT_LT(highlight_precision(gold, pred, e), 1.0);
  EXPECT_NEAR(highlight_recall(gold, pred, e), 1.0, 1e-6);

  // Oracle: the extra item's best match to gold, averaged in.
  const auto x = e.embed(pred[2]);
  const double best = std::max(similarity(x, e.embed(gold[0])), similarity(x, e.embed(gold[1])));
  EXPECT_NEAR(highlight_precision(gold, pred, e), (2.0 + best) / 3.0, 1e-9);
}

TEST(WeightedRecall, SentenceLongPredictionsArePenalized) {
  HashedTrigramEmbedder e;
  const Texts gold{"want to die"};
  const Texts sentence{"Some days I really want to die because nothing works out"};
  const double r = highlight_recall(gold, sentence, e);
  const double w = weighted_recall(gold, sentence, e);
  EXPECT_LT(w, r);
  EXPECT_NEAR(w, r * 3.0 / 11.0, 1e-12);

  const Texts shorter{"die"};
  EXPECT_NEAR(weighted_recall(gold, shorter, e), highlight_recall(gold, shorter, e), 1e-12);
}

TEST(Recall, MonotoneUnderAddedPredictions) {
  std::mt19937_64 rng(21);
  HashedTrigramEmbedder e;
  const Texts pool{"I want to die",  "want to die", "so tired",     "nobody cares", "pills", "I feel alone tonight",
                   "the game was fun", "tired of everything", "no way out", "alone"};
  for (int trial = 0; trial < 300; ++trial) {
    Texts gold, pred;
    for (std::size_t i = 0, n = 1 + rng() % 4; i < n; ++i) gold.push_back(pool[rng() % pool.size()]);
    for (std::size_t i = 0, n = rng() % 4; i < n; ++i) pred.push_back(pool[rng() % pool.size()]);
    const double before = highlight_recall(gold, pred, e);
    for (const auto& h : pool) {
      Texts more = pred;
      more.push_back(h);
      EXPECT_GE(highlight_recall(gold, more, e), before);
    }
    Texts dup = pred;
    dup.insert(dup.end(), pred.begin(), pred.end());
    EXPECT_DOUBLE_EQ(highlight_recall(gold, dup, e), before);

    Texts rgold = gold, rpred = pred;
    std::reverse(rgold.begin(), rgold.end());
    std::shuffle(rpred.begin(), rpred.end(), rng);
    EXPECT_NEAR(highlight_recall(rgold, rpred, e), before, 1e-12);
    EXPECT_NEAR(highlight_precision(rgold, rpred, e), highlight_precision(gold, pred, e), 1e-12);

    const auto all = score_highlights(gold, pred, e);
    EXPECT_NEAR(all.recall, before, 1e-12);
    EXPECT_NEAR(all.harmonic, harmonic(all.recall, all.precision), 1e-12);
    for (double s : {all.recall, all.precision, all.weighted_recall, all.harmonic}) {
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
  }
}

TEST(SummaryScores, StubJudgements) {
  const Texts gold{"I cannot sleep.", "I feel hopeless."};
  testing::FixedNli neutral(NliJudgement{0, 1, 0});
  auto s = summary_scores(gold, "The user reports insomnia. They feel hopeless.", neutral);
  EXPECT_DOUBLE_EQ(s.contradiction, 0.0);
  EXPECT_DOUBLE_EQ(s.consistency, 1.0);

  testing::FixedNli contra(NliJudgement{0, 0, 1});
  s = summary_scores(gold, "Everything is fine.", contra);
  EXPECT_DOUBLE_EQ(s.contradiction, 1.0);
  EXPECT_DOUBLE_EQ(s.consistency, 0.0);

  // Per gold sentence, the max over the two predicted sentences is 0.2 and 0.4.
  testing::FixedNli mixed([](std::string_view premise, std::string_view hypothesis) {
    const bool first = premise == "I cannot sleep.";
    const bool a = hypothesis == "Sentence A.";
    const double c = first ? (a ? 0.2 : 0.1) : (a ? 0.05 : 0.4);
    return NliJudgement{0.5, 0.5 - c, c};
  });
  s = summary_scores(gold, "Sentence A. Sentence B.", mixed);
  EXPECT_NEAR(s.contradiction, 0.3, 1e-12);
  EXPECT_NEAR(s.consistency, 0.7, 1e-12);

  EXPECT_THROW(summary_scores(Texts{}, "x", neutral), DataError);
  testing::FixedNli invalid(NliJudgement{0.5, 0.5, 0.5});
  EXPECT_THROW(summary_scores(gold, "x", invalid), std::exception);
}

TEST(HttpEmbedder, BatchesAndNormalizes) {
  testing::StubServer server;
  std::atomic<int> batches{0};
  server.post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
    ++batches;
    const auto j = nlohmann::json::parse(req.body);
    nlohmann::json vectors = nlohmann::json::array();
    for (const auto& t : j.at("texts")) vectors.push_back({3.0 * t.get<std::string>().size(), 4.0});
    res.set_content(nlohmann::json{{"vectors", vectors}}.dump(), "application/json");
  });
  server.start();
  HttpEmbedder e({server.url() + "/embed", "", 2s, 0}, 2);
  const Texts texts{"a", "a", "abc"};
  const auto v = e.embed_batch(texts);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(batches.load(), 2);
  EXPECT_NEAR(v[0][0], 0.6, 1e-12);
  EXPECT_NEAR(v[0][1], 0.8, 1e-12);
  EXPECT_NEAR(norm(v[2]), 1.0, 1e-12);
}

TEST(HttpEmbedder, ErrorsSurface) {
  testing::StubServer server;
  std::atomic<int> calls{0};
  server.post("/embed", [&](const httplib::Request&, httplib::Response& res) {
    if (++calls == 1) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"vectors": [[1, 0]]})", "application/json");
  });
  server.post("/bad", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"vectors": []})", "application/json");
  });
  server.start();
  HttpEmbedder retrying({server.url() + "/embed", "", 2s, 2});
  EXPECT_EQ(retrying.embed("x"), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(calls.load(), 2);
  HttpEmbedder bad({server.url() + "/bad", "", 2s, 0});
  EXPECT_THROW(bad.embed("x"), EndpointError);
}

TEST(HttpNli, ParsesJudgement) {
  testing::StubServer server;
  server.post("/nli", [](const httplib::Request& req, httplib::Response& res) {
    const auto j = nlohmann::json::parse(req.body);
    const bool same = j.at("premise") == j.at("hypothesis");
    res.set_content(nlohmann::json{{"entailment", same ? 0.9 : 0.1}, {"neutral", 0.1}, {"contradiction", same ? 0.0 : 0.8}}
                        .dump(),
                    "application/json");
  });
  server.start();
  HttpNliClient nli({server.url() + "/nli", "", 2s, 0});
  const auto j = nli.judge("a", "b");
  EXPECT_DOUBLE_EQ(j.contradiction, 0.8);
  const Texts gold{"Same."};
  const auto s = summary_scores(gold, "Same. Different.", nli);
  EXPECT_NEAR(s.contradiction, 0.8, 1e-12);
}

}  // namespace
}  // namespace riskev::eval
