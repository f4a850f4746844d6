#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "riskev/analysis.hpp"
#include "riskev/error.hpp"

namespace riskev::analysis {
namespace {

TEST(Tagger, LexiconSuffixAndFallback) {
  const HeuristicTagger t;
  EXPECT_EQ(t.tag_one("I"), PosTag::pron);
  EXPECT_EQ(t.tag_one("quickly"), PosTag::adv);
  EXPECT_EQ(t.tag_one("zorblax"), PosTag::noun);
  EXPECT_EQ(HeuristicTagger(PosTag::other).tag_one("zorblax"), PosTag::other);
  EXPECT_EQ(t.tag_one("the"), PosTag::other);

  const corpus::AnnotatedText s("I quickly ran to the hopeless house");
  const auto tags = tag_pos(s.tokens, t);
  EXPECT_EQ(tags.size(), s.tokens.size());
  EXPECT_EQ(tags, tag_pos(s.tokens, t));
  for (auto tag : kReportedTags) EXPECT_EQ(parse_pos_tag(to_string(tag)), tag);
}

TEST(SentenceStats, Proportions) {
  const std::vector<PosTag> tags{PosTag::pron, PosTag::verb, PosTag::verb, PosTag::other};
  const auto s = sentence_stats(tags, true);
  EXPECT_EQ(s.length, 4u);
  EXPECT_DOUBLE_EQ(s.proportions[1], 0.5);
  EXPECT_DOUBLE_EQ(s.proportions[4], 0.25);
  double sum = 0;
  for (double p : s.proportions) sum += p;
  EXPECT_LE(sum, 1.0);
  EXPECT_EQ(sentence_stats({}, false).length, 0u);
}

TEST(Permutation, IdenticalGroupsGiveOne) {
  const std::vector<double> a{1, 2, 3, 4}, b{4, 3, 2, 1};
  const auto r = permutation_test(a, b, {2000, 1, 0});
  EXPECT_EQ(r.observed, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_THROW(permutation_test(a, {}, {}), DataError);
}

TEST(Permutation, DisjointFiveVersusFive) {
  const std::vector<double> a(5, 0.0), b(5, 9.0);
  const auto r = permutation_test(a, b, {100000, 7, 0});
  const double exact = 2.0 / 252.0;
  EXPECT_NEAR(exact, testing::exact_permutation_p(a, b), 1e-15);
  EXPECT_LE(r.p_value, 0.01);
  EXPECT_NEAR(r.p_value, exact, 3 * std::sqrt(exact * (1 - exact) / 100000) + 1e-5);
  EXPECT_EQ(r.n_permutations, 100000u);
  EXPECT_DOUBLE_EQ(r.observed, -9.0);
}

TEST(Permutation, MatchesExactEnumeration) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t na = 2 + rng() % 4, nb = 2 + rng() % 4;
    std::vector<double> a(na), b(nb);
    for (auto& x : a) x = static_cast<double>(rng() % 6);
    for (auto& x : b) x = static_cast<double>(rng() % 6) + 1.0;
    const std::size_t n = 20000;
    const auto r = permutation_test(a, b, {n, static_cast<std::uint64_t>(trial), 0});
    const double exact = testing::exact_permutation_p(a, b);
    EXPECT_NEAR(r.p_value, exact, 3 * std::sqrt(exact * (1 - exact) / n) + 2.0 / n) << "trial " << trial;
    EXPECT_GT(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
  }
}

TEST(Permutation, SeededAndWorkerIndependent) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<double> a(40), b(55);
  for (auto& x : a) x = g(rng);
  for (auto& x : b) x = g(rng) + 0.3;
  const auto one = permutation_test(a, b, {5000, 99, 1});
  const auto many = permutation_test(a, b, {5000, 99, 8});
  EXPECT_EQ(one.p_value, many.p_value);
  EXPECT_EQ(permutation_test(a, b, {5000, 99, 3}).p_value, one.p_value);
  EXPECT_EQ(one.seed, 99u);
}

corpus::Post post_of(std::string id, std::string body) {
  corpus::Post p;
  p.post_id = std::move(id);
  p.user_id = "u";
  p.body = std::move(body);
  return p;
}

TEST(Compare, LongerImportantSentencesAreDetected) {
  corpus::Corpus c;
  corpus::UserRecord user;
  user.user_id = "u";
  std::vector<evidence::Highlight> highlights;
  std::mt19937_64 rng(4);
  const std::vector<std::string> words{"pain", "night", "sleep", "walk", "garden", "phone", "bread", "window"};
  for (int p = 0; p < 30; ++p) {
    auto sentence = [&](std::size_t n) {
      std::string s;
      for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + words[rng() % words.size()];
      return s + ".";
    };
    const std::size_t base = 4 + rng() % 3;
    const std::string important = sentence(2 * base), other = sentence(base);
    const std::string body = other + " " + important + " " + sentence(base);
    user.posts.push_back(post_of("p" + std::to_string(p), body));
    evidence::Highlight h;
    h.user_id = "u";
    h.post_id = user.posts.back().post_id;
    const IndexedText text(body);
    h.span.start = IndexedText(other + " ").size();
    h.span.end = h.span.start + IndexedText(important).size();
    h.span.text = text.slice(h.span.start, h.span.end);
    highlights.push_back(h);
  }
  c.users.push_back(user);
  const auto rows = compare_important_vs_other(c, highlights, HeuristicTagger(), {20000, 5, 0});
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].name, "NOUN");
  EXPECT_EQ(rows[5].name, "LENGTH");
  EXPECT_LT(rows[5].test.p_value, 0.05);
  EXPECT_GT(rows[5].test.mean_a, 1.8 * rows[5].test.mean_b);

  std::ostringstream csv;
  write_comparison_csv(csv, rows);
  const std::string text = csv.str();
  EXPECT_TRUE(text.starts_with("tag,mean_important,mean_other,diff,p_value\n"));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);

  EXPECT_THROW(compare_important_vs_other(c, {}, HeuristicTagger(), {100, 0, 0}), DataError);
}

TEST(Compare, IdenticalGroupsAllOne) {
  std::vector<SentenceStats> stats;
  const std::vector<PosTag> tags{PosTag::pron, PosTag::verb, PosTag::noun};
  for (bool imp : {true, false, true, false}) stats.push_back(sentence_stats(tags, imp));
  const auto rows = compare_groups(stats, {1000, 0, 0});
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) EXPECT_EQ(r.test.p_value, 1.0) << r.name;
}

TEST(Ctfidf, FormulaAndProperties) {
  const std::vector<std::vector<std::string>> clusters{{"pills pills sleep", "sleep common"}, {"job common", "boss"}};
  const auto m = ctfidf_scores(clusters);
  ASSERT_EQ(m.vocabulary, (std::vector<std::string>{"boss", "common", "job", "pills", "sleep"}));
  // Cluster token counts 5 and 3, so A = 4.
  const double A = 4.0;
  auto col = [&](const std::string& t) {
    return static_cast<std::size_t>(std::find(m.vocabulary.begin(), m.vocabulary.end(), t) - m.vocabulary.begin());
  };
  EXPECT_NEAR(m.scores[0][col("pills")], 2 * std::log(1 + A / 2), 1e-12);
  EXPECT_NEAR(m.scores[0][col("common")], 1 * std::log(1 + A / 2), 1e-12);
  EXPECT_EQ(m.scores[1][col("pills")], 0.0);
  EXPECT_NEAR(m.scores[1][col("boss")], std::log(1 + A / 1), 1e-12);
  // Same tf: the shared term ranks below the exclusive one.
  EXPECT_LT(m.scores[1][col("common")], m.scores[1][col("boss")]);

  const auto top = ctfidf(clusters, 100);
  EXPECT_EQ(top[0].keywords.size(), 5u);
  EXPECT_EQ(top[0].keywords[0].term, "pills");
  for (const auto& c : top) {
    for (const auto& k : c.keywords) EXPECT_GE(k.score, 0.0);
  }
  const auto json = nlohmann::json::parse(topics_to_json(top));
  EXPECT_EQ(json.size(), 2u);
  EXPECT_EQ(json[0]["cluster_id"], 0);

  EXPECT_THROW(ctfidf_scores(std::vector<std::vector<std::string>>{{"a"}}), DataError);
  EXPECT_THROW(ctfidf_scores(std::vector<std::vector<std::string>>{{"a"}, {}}), DataError);
}

TEST(Ctfidf, RankingInvariantUnderCountScaling) {
  const std::vector<std::vector<std::string>> base{{"a a b c", "d"}, {"b e e", "f c"}, {"a f f g"}};
  std::vector<std::vector<std::string>> tripled;
  for (const auto& c : base) {
    std::vector<std::string> docs;
    for (int r = 0; r < 3; ++r) docs.insert(docs.end(), c.begin(), c.end());
    tripled.push_back(docs);
  }
  const auto x = ctfidf(base, 10), y = ctfidf(tripled, 10);
  for (std::size_t c = 0; c < x.size(); ++c) {
    ASSERT_EQ(x[c].keywords.size(), y[c].keywords.size());
    for (std::size_t i = 0; i < x[c].keywords.size(); ++i) EXPECT_EQ(x[c].keywords[i].term, y[c].keywords[i].term);
  }
}

std::vector<double> unit(std::vector<double> v) {
  double n = 0;
  for (double x : v) n += x * x;
  for (double& x : v) x /= std::sqrt(n);
  return v;
}

TEST(Cluster, SeparatesBlobs) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<std::vector<double>> v;
  for (int i = 0; i < 40; ++i) {
    const bool left = i % 2 == 0;
    v.push_back(unit({(left ? 1.0 : 0.0) + noise(rng), (left ? 0.0 : 1.0) + noise(rng), 0.2 + noise(rng)}));
  }
  const auto r = cluster_docs(v, 2, 3);
  EXPECT_TRUE(r.converged);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(r.assignments[i], r.assignments[i % 2]);
  EXPECT_NE(r.assignments[0], r.assignments[1]);
  EXPECT_EQ(cluster_docs(v, 2, 3).assignments, r.assignments);
}

TEST(Cluster, SingletonsAndErrors) {
  const std::vector<std::vector<double>> v{unit({1, 0, 0}), unit({0, 1, 0}), unit({0, 0, 1}), unit({1, 1, 0})};
  const auto r = cluster_docs(v, 4);
  EXPECT_EQ(std::set<std::size_t>(r.assignments.begin(), r.assignments.end()).size(), 4u);
  EXPECT_THROW(cluster_docs(v, 5), DataError);
  EXPECT_THROW(cluster_docs(v, 1), DataError);
}

TEST(TopicPrompt, FillsPlaceholders) {
  const std::vector<std::string> docs{"doc one", "doc two"};
  const std::vector<Keyword> kw{{"pain", 1.0}, {"sleep", 0.5}};
  const auto p = topic_label_prompt(docs, kw);
  EXPECT_NE(p.find("doc one\ndoc two"), std::string::npos);
  EXPECT_NE(p.find("'pain, sleep'"), std::string::npos);
  EXPECT_EQ(p.find("[KEYWORDS]"), std::string::npos);
  EXPECT_EQ(p.find("[DOCUMENTS]"), std::string::npos);
}

}  // namespace
}  // namespace riskev::analysis
