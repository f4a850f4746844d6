#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "riskev/corpus.hpp"
#include "riskev/evidence.hpp"

namespace riskev::evidence {
namespace {

using corpus::AnnotatedText;

std::string word_name(std::size_t i) {
  std::string w = "w";
  w += static_cast<char>('a' + i / 26);
  w += static_cast<char>('a' + i % 26);
  return w;
}

std::vector<std::string> texts(const std::vector<Highlight>& hs) {
  std::vector<std::string> out;
  for (const auto& h : hs) out.push_back(h.span.text);
  return out;
}

Highlight make(std::string post, std::size_t start, std::string text) {
  Highlight h;
  h.user_id = "u";
  h.post_id = std::move(post);
  h.span = {start, start + IndexedText(text).size(), text};
  return h;
}

TEST(AlignFeature, CaseFoldedVerbatim) {
  const AnnotatedText post("I WANT to die.");
  const auto spans = align_feature(post.text, post.tokens, "want to die");
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].text, "WANT to die");
  EXPECT_EQ(post.text.slice(spans[0].start, spans[0].end), spans[0].text);
}

TEST(AlignFeature, InterveningPunctuationIsKept) {
  const AnnotatedText post("I will die, alone and tired.");
  const auto spans = align_feature(post.text, post.tokens, "die alone");
  ASSERT_EQ(spans.size(), 1u);
  // Oracle from token offsets: start of "die", end of "alone".
  const auto& toks = post.tokens;
  const auto die = std::find_if(toks.begin(), toks.end(), [](const auto& t) { return t.text == "die"; });
  ASSERT_NE(die, toks.end());
  EXPECT_EQ(spans[0].start, die->start);
  EXPECT_EQ(spans[0].end, std::next(die)->end);
  EXPECT_EQ(spans[0].text, "die, alone");
}

TEST(AlignFeature, AbsentAndRepeated) {
  const AnnotatedText post("so tired. So Tired of it. so tired");
  EXPECT_TRUE(align_feature(post.text, post.tokens, "not here").empty());
  const auto spans = align_feature(post.text, post.tokens, "so tired");
  ASSERT_EQ(spans.size(), 3u);
  EXPECT_EQ(spans[1].text, "So Tired");
  EXPECT_TRUE(std::is_sorted(spans.begin(), spans.end(), [](const auto& a, const auto& b) { return a.start < b.start; }));
}

TEST(AlignFeature, AccentsAreStrippedForMatching) {
  const AnnotatedText post("Je suis très fatigué.");
  const auto spans = align_feature(post.text, post.tokens, "tres fatigue");
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].text, "très fatigué");
}

TEST(WindowHighlight, ShortSentenceClampsToSentence) {
  const AnnotatedText post("First one here. I want to die now. Last one.");
  const auto f = align_feature(post.text, post.tokens, "to die").at(0);
  const auto h = window_highlight(post.text, f, post.sentences, post.tokens, 14);
  EXPECT_EQ(h.text, "I want to die now.");
  EXPECT_EQ(window_highlight(post.text, f, post.sentences, post.tokens, 0), f);
}

TEST(WindowHighlight, FortyWordSentence) {
  std::string sentence;
  for (std::size_t i = 0; i < 40; ++i) sentence += (i ? " " : "") + word_name(i);
  sentence += ".";
  const AnnotatedText post("Before this. " + sentence + " After that.");
  // Words are 1-indexed: the feature is words 20 and 21.
  const auto f = align_feature(post.text, post.tokens, word_name(19) + " " + word_name(20)).at(0);
  const auto h = window_highlight(post.text, f, post.sentences, post.tokens, 14);
  const auto inside = corpus::word_tokenize(IndexedText(h.text));
  ASSERT_EQ(inside.size(), 30u);
  EXPECT_EQ(inside.front().text, word_name(5));  // word 6
  EXPECT_EQ(inside.back().text, word_name(34));  // word 35
  EXPECT_EQ(post.text.slice(h.start, h.end), h.text);
}

TEST(WindowHighlight, UnboundedEqualsSentenceMode) {
  const AnnotatedText post("Alpha beta gamma. Delta epsilon zeta eta theta! Iota kappa?");
  for (const auto& tok : post.tokens) {
    EXPECT_EQ(window_highlight(post.text, tok, post.sentences, post.tokens, kUnboundedWindow),
              sentence_highlight(tok, post.sentences));
  }
}

TEST(SentenceHighlight, FeaturesInOneAndAdjacentSentences) {
  const AnnotatedText post("I feel so alone. Nobody would care if I was gone.");
  const std::vector<std::string> same{"feel so", "so alone"};
  HighlightConfig cfg;
  const auto one = highlight_post("u", "p", post, same, cfg);
  ASSERT_EQ(one.highlights.size(), 1u);
  EXPECT_EQ(one.highlights[0].span.text, "I feel so alone.");
  EXPECT_EQ(one.important_sentences, (std::vector<std::size_t>{0}));

  const std::vector<std::string> both{"was gone", "so alone"};
  const auto two = highlight_post("u", "p", post, both, cfg);
  EXPECT_EQ(texts(two.highlights),
            (std::vector<std::string>{"I feel so alone.", "Nobody would care if I was gone."}));
  EXPECT_EQ(two.important_sentences, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(two.highlights[1].feature, "was gone");
  EXPECT_EQ(two.highlights[1].source, Source::goml);
}

TEST(HighlightPost, FlagsUnalignedFeatures) {
  const AnnotatedText post("Nothing matters anymore.");
  const std::vector<std::string> feats{"matters anymore", "not present"};
  const auto ev = highlight_post("u", "p", post, feats, {});
  EXPECT_EQ(ev.highlights.size(), 1u);
  EXPECT_EQ(ev.unaligned_features, (std::vector<std::string>{"not present"}));
}

TEST(Dedup, LongestMatchWins) {
  std::vector<Highlight> hs{make("p", 2, "want to die"), make("p", 0, "I want to die")};
  const auto out = dedup_highlights(hs, false);
  EXPECT_EQ(texts(out), (std::vector<std::string>{"I want to die"}));

  std::vector<Highlight> twins{make("p", 3, "same"), make("p", 3, "same")};
  EXPECT_EQ(dedup_highlights(twins, false).size(), 1u);

  std::vector<Highlight> other_posts{make("p", 0, "I want to die"), make("q", 2, "want to die")};
  EXPECT_EQ(dedup_highlights(other_posts, false).size(), 2u);
}

TEST(Dedup, KeepDuplicatesIsPassThrough) {
  std::vector<Highlight> hs{make("p", 2, "want to die"), make("p", 0, "I want to die"), make("p", 2, "want to die")};
  EXPECT_EQ(dedup_highlights(hs, true), hs);
}

TEST(Dedup, OverlapsAreKeptUnlessMerged) {
  const AnnotatedText post("one two three four");
  std::vector<Highlight> hs{make("p", 0, "one two three"), make("p", 4, "two three four")};
  EXPECT_EQ(dedup_highlights(hs, false).size(), 2u);
  const auto merged = merge_overlapping(hs, post.text);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged[0].span.text, "one two three four");
  EXPECT_EQ(merged[0].span.start, 0u);
}

TEST(Dedup, PropertyIdempotentAndSubstringFree) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> words{"i", "want", "to", "die", "so", "tired", "alone", "now"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Highlight> hs;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      std::string t;
      const std::size_t len = 1 + rng() % 4, first = rng() % words.size();
      for (std::size_t k = 0; k < len; ++k) t += (k ? " " : "") + words[(first + k) % words.size()];
      hs.push_back(make(rng() % 3 == 0 ? "q" : "p", rng() % 20, t));
    }
    const auto once = dedup_highlights(hs, false);
    EXPECT_EQ(dedup_highlights(once, false), once);
    for (const auto& a : once) {
      for (const auto& b : once) {
        if (&a == &b || a.post_id != b.post_id) continue;
        EXPECT_EQ(b.span.text.find(a.span.text), std::string::npos) << a.span.text << " in " << b.span.text;
      }
    }
    EXPECT_TRUE(std::is_sorted(once.begin(), once.end(), [](const auto& a, const auto& b) {
      return std::tie(a.post_id, a.span.start, a.span.end) < std::tie(b.post_id, b.span.start, b.span.end);
    }));
  }
}

TEST(HighlightPost, PropertyVerbatimInvariant) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> vocab{"I",     "feel",  "Alone", "tonight", "want", "to",    "die",
                                       "nobody", "cares", "héllo", "ok",      "again", "tired", "so"};
  const std::vector<std::string> stops{". ", "! ", "? ", ", ", " ", " ", " ", "\n\n"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::string body;
    const std::size_t n = 3 + rng() % 40;
    for (std::size_t i = 0; i < n; ++i) body += vocab[rng() % vocab.size()] + stops[rng() % stops.size()];
    const AnnotatedText post(body);
    std::vector<std::string> feats;
    for (int f = 0; f < 3 && post.tokens.size() >= 2; ++f) {
      const std::size_t at = rng() % (post.tokens.size() - 1);
      std::string a = post.tokens[at].text, b = post.tokens[at + 1].text;
      features::TfidfConfig norm;
      feats.push_back(features::normalize_term(a, norm) + " " + features::normalize_term(b, norm));
    }
    HighlightConfig cfg;
    cfg.mode = trial % 2 ? HighlightMode::window : HighlightMode::sentence;
    cfg.window_words = rng() % 6;
    const auto ev = highlight_post("u", "p", post, feats, cfg);
    EXPECT_TRUE(ev.unaligned_features.empty());
    for (const auto& h : ev.highlights) {
      ASSERT_LT(h.span.start, h.span.end);
      EXPECT_EQ(post.text.slice(h.span.start, h.span.end), h.span.text);
      const auto s = post.sentence_at(h.span.start);
      ASSERT_TRUE(s.has_value());
      EXPECT_LE(h.span.end, post.sentences[*s].span.end);
    }
  }
}

TEST(Enums, RoundTrip) {
  EXPECT_EQ(parse_source(to_string(Source::llm)), Source::llm);
  EXPECT_EQ(parse_highlight_mode(to_string(HighlightMode::window)), HighlightMode::window);
  EXPECT_FALSE(parse_highlight_mode("paragraph").has_value());
}

}  // namespace
}  // namespace riskev::evidence
