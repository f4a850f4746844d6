#include "riskev/cli/synth.hpp"

#include <array>
#include <cstdio>
#include <string_view>

#include "riskev/error.hpp"
#include "riskev/random.hpp"

namespace riskev::cli {

namespace {

constexpr std::array<std::string_view, 18> kRisk{
    "I do not want to be here anymore.",
    "Every night I think about ending it all.",
    "Nobody would even notice if I was gone.",
    "I wrote a note for my family last week.",
    "I feel completely hopeless and empty inside.",
    "There is no reason for me to keep living.",
    "I have been looking up ways to kill myself.",
    "The pain never stops no matter what I do.",
    "I just want everything to finally be over.",
    "I am a burden to everyone around me.",
    "I can't see any future for myself.",
    "My thoughts keep telling me to end my life.",
    "I gave away most of my things this month.",
    "I feel trapped and there is no way out.",
    "Sometimes I stand on the bridge and wait.",
    "I stopped taking my meds on purpose.",
    "I hate myself more every single day.",
    "Tonight feels like the night I give up.",
};

constexpr std::array<std::string_view, 18> kCalm{
    "We went hiking with friends on Saturday.",
    "My new job is going better than expected.",
    "I finally finished the book my sister recommended.",
    "The garden is full of tomatoes this year.",
    "I am looking forward to the concert next week.",
    "Our team won the league final yesterday.",
    "I started learning to play the guitar.",
    "The weather was perfect for a long bike ride.",
    "I cooked dinner for my parents tonight.",
    "Work has been busy but I feel good about it.",
    "My cat learned to open the kitchen door.",
    "We are planning a trip to the coast in spring.",
    "I passed the driving test on my first try.",
    "The new coffee place downtown is great.",
    "I feel grateful for the people in my life.",
    "My roommate and I painted the living room.",
    "I have been sleeping well since I changed jobs.",
    "The kids loved the museum visit today.",
};

constexpr std::array<std::string_view, 24> kFiller{
    "I have been thinking about this for a while.",
    "My roommate asked me what was going on.",
    "It rained all day and the bus was late.",
    "I went to class and then came back home.",
    "Work was long and boring again.",
    "My phone screen cracked this morning.",
    "I talked to my brother on the phone.",
    "The apartment is quiet at night.",
    "I watched some videos until late.",
    "I am not sure how to explain it.",
    "My mom called to ask about the weekend.",
    "I had coffee and skipped breakfast.",
    "There was a long line at the store.",
    "I have exams coming up soon.",
    "The neighbours were loud again.",
    "I forgot my keys at the office.",
    "Someone posted something similar here before.",
    "Dr. Smith moved my appointment to Friday.",
    "I read a few threads on this sub.",
    "My friend said I should write it down.",
    "The semester started two weeks ago.",
    "I do not usually post here.",
    "It is hard to put into words.",
    "Thanks for reading this far.",
};

constexpr std::array<std::string_view, 8> kTitles{
    "Need to talk",   "Just venting", "Long week",    "Update",
    "First post here", "Not sure anymore", "Some news", "Random thoughts",
};

template <std::size_t N>
std::string_view pick(const std::array<std::string_view, N>& items, std::mt19937_64& rng) {
  return items[uniform_below(rng, N)];
}

std::size_t between(std::size_t lo, std::size_t hi, std::mt19937_64& rng) {
  return lo + static_cast<std::size_t>(uniform_below(rng, hi - lo + 1));
}

}  // namespace

corpus::Corpus synthetic_corpus(const SynthOptions& o) {
  if (o.min_posts == 0 || o.min_posts > o.max_posts || o.min_sentences == 0 || o.min_sentences > o.max_sentences) {
    throw DataError("synthetic corpus: invalid post or sentence range");
  }
  auto rng = stream_rng(o.seed, 0);
  corpus::Corpus c;
  for (std::size_t u = 0; u < o.users; ++u) {
    char id[32];
    std::snprintf(id, sizeof id, "%04zu", u);
    corpus::UserRecord user;
    user.user_id = o.user_prefix + id;
    const bool at_risk = uniform_unit(rng) < o.risk_fraction;
    user.label = at_risk ? static_cast<corpus::RiskLabel>(1 + uniform_below(rng, 3)) : corpus::RiskLabel::a;
    const auto posts = between(o.min_posts, o.max_posts, rng);
    for (std::size_t p = 0; p < posts; ++p) {
      corpus::Post post;
      post.user_id = user.user_id;
      post.post_id = user.user_id + "_p" + std::to_string(p);
      if (o.titles) post.title = std::string(pick(kTitles, rng));
      const auto sentences = between(o.min_sentences, o.max_sentences, rng);
      for (std::size_t s = 0; s < sentences; ++s) {
        std::string_view sentence = pick(kFiller, rng);
        if (uniform_unit(rng) < o.signal_rate) sentence = at_risk ? pick(kRisk, rng) : pick(kCalm, rng);
        if (!post.body.empty()) post.body += uniform_below(rng, 5) == 0 ? "\n\n" : " ";
        post.body += sentence;
      }
      user.posts.push_back(std::move(post));
    }
    c.users.push_back(std::move(user));
  }
  return c;
}

LabeledDocs separable_documents(std::size_t n, std::uint64_t seed) {
  static constexpr std::array<std::string_view, 5> positive{"dark thoughts", "end everything", "final goodbye",
                                                            "no hope", "pills ready"};
  static constexpr std::array<std::string_view, 5> negative{"sunny picnic", "birthday cake", "football practice",
                                                            "new puppy", "beach holiday"};
  static constexpr std::array<std::string_view, 12> words{"today", "really", "about", "again", "maybe", "friends",
                                                          "school", "evening", "because", "little", "morning",
                                                          "later"};
  auto rng = stream_rng(seed, 1);
  LabeledDocs out;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : -1;
    std::string doc;
    const auto len = between(4, 9, rng);
    const auto at = uniform_below(rng, len);
    for (std::size_t w = 0; w < len; ++w) {
      if (w == at) {
        doc += std::string(label > 0 ? pick(positive, rng) : pick(negative, rng)) + " ";
        if (uniform_below(rng, 2) == 0) doc += std::string(label > 0 ? pick(positive, rng) : pick(negative, rng)) + " ";
      }
      doc += std::string(pick(words, rng)) + " ";
    }
    doc.pop_back();
    doc += ".";
    out.docs.push_back(std::move(doc));
    out.labels.push_back(label);
  }
  return out;
}

}  // namespace riskev::cli
