#include "riskev/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "riskev/error.hpp"
#include "riskev/parallel.hpp"
#include "riskev/random.hpp"
#include "riskev/text.hpp"

namespace riskev::analysis {

std::string_view to_string(PosTag tag) {
  switch (tag) {
    case PosTag::noun: return "NOUN";
    case PosTag::verb: return "VERB";
    case PosTag::adj: return "ADJ";
    case PosTag::adv: return "ADV";
    case PosTag::pron: return "PRON";
    case PosTag::other: return "OTHER";
  }
  return "OTHER";
}

PosTag parse_pos_tag(std::string_view name) {
  for (auto tag : {PosTag::noun, PosTag::verb, PosTag::adj, PosTag::adv, PosTag::pron, PosTag::other}) {
    if (to_string(tag) == name) return tag;
  }
  throw DataError("unknown PoS tag '" + std::string(name) + "'");
}

namespace {

const std::unordered_map<std::string_view, PosTag>& lexicon() {
  static const auto table = [] {
    std::unordered_map<std::string_view, PosTag> t;
    auto add = [&](PosTag tag, std::initializer_list<std::string_view> words) {
      for (auto w : words) t.emplace(w, tag);
    };
    add(PosTag::pron, {"i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "yourselves", "he",
                       "him", "his", "himself", "she", "her", "hers", "herself", "it", "its", "itself", "we", "us",
                       "our", "ours", "ourselves", "they", "them", "their", "theirs", "themselves", "who", "whom",
                       "whose", "someone", "somebody", "anyone", "anybody", "everyone", "everybody", "nobody",
                       "noone", "nothing", "something", "anything", "everything", "u", "ya", "ur"});
    add(PosTag::verb, {"be", "am", "is", "are", "was", "were", "been", "being", "have", "has", "had", "do", "does",
                       "did", "will", "would", "can", "could", "should", "shall", "may", "might", "must", "want",
                       "wanted", "feel", "feels", "felt", "think", "thought", "know", "knew", "get", "gets", "got",
                       "go", "goes", "went", "gone", "make", "made", "take", "took", "see", "saw", "seen", "say",
                       "said", "tell", "told", "try", "tried", "need", "needs", "like", "love", "hate", "kill",
                       "die", "died", "live", "hurt", "cry", "help", "keep", "kept", "leave", "left", "give",
                       "gave", "come", "came", "let", "put", "seem", "seems", "find", "found", "end", "stop",
                       "m", "ve", "ll", "re", "d", "don", "didn", "doesn", "won", "isn", "wasn", "aren",
                       "weren", "couldn", "wouldn", "shouldn", "haven", "hasn", "hadn", "ain", "wanna", "gonna"});
    add(PosTag::adv, {"not", "t", "never", "always", "very", "really", "just", "so", "too", "also", "still", "even",
                      "ever", "again", "here", "there", "now", "then", "often", "sometimes", "maybe", "perhaps",
                      "almost", "already", "anymore", "only", "well", "soon", "once", "away", "back", "yet",
                      "today", "tomorrow", "tonight", "together", "else", "rather", "quite", "pretty"});
    add(PosTag::adj, {"good", "bad", "sad", "happy", "alone", "tired", "lonely", "depressed", "anxious", "worthless",
                      "hopeless", "better", "worse", "best", "worst", "new", "old", "other", "same", "little",
                      "big", "own", "sure", "okay", "ok", "fine", "able", "whole", "much", "many", "few", "more",
                      "most", "last", "long", "great", "hard", "real", "dead", "sick", "afraid", "scared", "numb",
                      "empty", "young", "free", "high", "low", "different", "wrong", "right", "next", "only",
                      "single", "close", "able", "ready", "sorry", "glad", "angry"});
    add(PosTag::other,
        {"the", "a", "an", "and", "or", "but", "nor", "if", "because", "since", "though", "although", "while",
         "whereas", "unless", "until", "of", "to", "in", "on", "at", "for", "with", "about", "from", "by", "as",
         "into", "onto", "over", "under", "after", "before", "than", "through", "between", "against", "without",
         "within", "during", "up", "down", "out", "off", "that", "this", "these", "those", "some", "any", "no",
         "all", "every", "each", "both", "either", "neither", "what", "which", "when", "where", "why", "how",
         "whether", "yes", "yeah", "oh", "lol", "s", "please", "thanks", "hi", "hey", "um", "uh"});
    return t;
  }();
  return table;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() + 2 && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

PosTag HeuristicTagger::tag_one(std::string_view token) const {
  const std::string lower = to_lower(token);
  if (auto it = lexicon().find(lower); it != lexicon().end()) return it->second;
  if (ends_with(lower, "ly")) return PosTag::adv;
  for (auto s : {"ing", "ed", "ize", "ise", "ify"}) {
    if (ends_with(lower, s)) return PosTag::verb;
  }
  for (auto s : {"ous", "ful", "less", "able", "ible", "ive", "ic", "ish", "ary"}) {
    if (ends_with(lower, s)) return PosTag::adj;
  }
  for (auto s : {"tion", "sion", "ment", "ness", "ity", "ship", "ance", "ence", "ism", "ist", "er", "or"}) {
    if (ends_with(lower, s)) return PosTag::noun;
  }
  return fallback_;
}

std::vector<PosTag> HeuristicTagger::tag(std::span<const std::string> tokens) const {
  std::vector<PosTag> tags;
  tags.reserve(tokens.size());
  for (const auto& t : tokens) tags.push_back(tag_one(t));
  return tags;
}

std::vector<PosTag> tag_pos(std::span<const corpus::TokenSpan> tokens, const Tagger& tagger) {
  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (const auto& t : tokens) words.push_back(t.text);
  auto tags = tagger.tag(words);
  if (tags.size() != tokens.size()) throw DataError("tagger returned a different number of tags than tokens");
  return tags;
}

SentenceStats sentence_stats(std::span<const PosTag> tags, bool important) {
  SentenceStats s;
  s.length = tags.size();
  s.important = important;
  if (tags.empty()) return s;
  for (std::size_t i = 0; i < kReportedTags.size(); ++i) {
    const auto n = std::count(tags.begin(), tags.end(), kReportedTags[i]);
    s.proportions[i] = static_cast<double>(n) / static_cast<double>(tags.size());
  }
  return s;
}

namespace {

// Independent of the thread count.
constexpr std::size_t kPermutationShards = 64;

double mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

PermutationResult permutation_test(std::span<const double> group_a, std::span<const double> group_b,
                                   const PermutationOptions& options) {
  if (group_a.empty() || group_b.empty()) throw DataError("permutation test: both groups must be non-empty");
  PermutationResult r;
  r.mean_a = mean(group_a);
  r.mean_b = mean(group_b);
  r.observed = r.mean_a - r.mean_b;
  r.n_permutations = options.n_permutations;
  r.seed = options.seed;

  std::vector<double> pool(group_a.begin(), group_a.end());
  pool.insert(pool.end(), group_b.begin(), group_b.end());
  const double total = std::accumulate(pool.begin(), pool.end(), 0.0);
  const std::size_t n = pool.size();
  // Shuffle only as many slots as the smaller group needs.
  const bool a_smaller = group_a.size() <= group_b.size();
  const std::size_t m = a_smaller ? group_a.size() : group_b.size();

  double scale = 0.0;
  for (double x : pool) scale = std::max(scale, std::abs(x));
  const double threshold = std::abs(r.observed) - 1e-12 * std::max(1.0, scale);

  const std::size_t shards = std::min(kPermutationShards, std::max<std::size_t>(1, options.n_permutations));
  std::vector<std::size_t> hits(shards, 0);
  const std::size_t workers = options.workers == 0 ? default_workers() : options.workers;
  parallel_for(shards, workers, [&](std::size_t shard) {
    const std::size_t count = options.n_permutations / shards + (shard < options.n_permutations % shards ? 1 : 0);
    auto rng = stream_rng(options.seed, shard);
    std::vector<double> local = pool;
    std::size_t local_hits = 0;
    for (std::size_t p = 0; p < count; ++p) {
      double picked = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
        std::swap(local[i], local[j]);
        picked += local[i];
      }
      const double mean_small = picked / static_cast<double>(m);
      const double mean_large = (total - picked) / static_cast<double>(n - m);
      const double diff = a_smaller ? mean_small - mean_large : mean_large - mean_small;
      if (std::abs(diff) >= threshold) ++local_hits;
    }
    hits[shard] = local_hits;
  });
  const auto extreme = std::accumulate(hits.begin(), hits.end(), std::size_t{0});
  r.p_value = static_cast<double>(1 + extreme) / static_cast<double>(1 + options.n_permutations);
  return r;
}

std::vector<ComparisonRow> compare_groups(std::span<const SentenceStats> sentences, const PermutationOptions& options) {
  std::vector<const SentenceStats*> important, other;
  for (const auto& s : sentences) (s.important ? important : other).push_back(&s);
  if (important.empty()) throw DataError("comparison: no important sentences");
  if (other.empty()) throw DataError("comparison: no other sentences");

  auto column = [](const std::vector<const SentenceStats*>& group, auto&& get) {
    std::vector<double> xs;
    xs.reserve(group.size());
    for (const auto* s : group) xs.push_back(get(*s));
    return xs;
  };
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < kReportedTags.size(); ++i) {
    auto get = [i](const SentenceStats& s) { return s.proportions[i]; };
    rows.push_back({std::string(to_string(kReportedTags[i])),
                    permutation_test(column(important, get), column(other, get), options)});
  }
  auto length = [](const SentenceStats& s) { return static_cast<double>(s.length); };
  rows.push_back({"LENGTH", permutation_test(column(important, length), column(other, length), options)});
  return rows;
}

std::vector<ComparisonRow> compare_important_vs_other(const corpus::Corpus& corpus,
                                                      std::span<const evidence::Highlight> highlights,
                                                      const Tagger& tagger, const PermutationOptions& options,
                                                      bool include_title) {
  std::map<std::pair<std::string, std::string>, std::vector<const evidence::Highlight*>> by_post;
  for (const auto& h : highlights) by_post[{h.user_id, h.post_id}].push_back(&h);

  std::vector<SentenceStats> stats;
  for (const auto& user : corpus.users) {
    for (const auto& post : user.posts) {
      const corpus::AnnotatedText text(post.text(include_title));
      const auto it = by_post.find({user.user_id, post.post_id});
      for (const auto& sentence : text.sentences) {
        std::vector<corpus::TokenSpan> tokens;
        for (const auto& t : text.tokens) {
          if (t.start >= sentence.span.start && t.end <= sentence.span.end) tokens.push_back(t);
        }
        if (tokens.empty()) continue;
        bool important = false;
        if (it != by_post.end()) {
          for (const auto* h : it->second) {
            if (h->span.start < sentence.span.end && sentence.span.start < h->span.end) {
              important = true;
              break;
            }
          }
        }
        stats.push_back(sentence_stats(tag_pos(tokens, tagger), important));
      }
    }
  }
  return compare_groups(stats, options);
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
  out << "tag,mean_important,mean_other,diff,p_value\n";
  const auto old_precision = out.precision(10);
  for (const auto& row : rows) {
    out << row.name << ',' << row.test.mean_a << ',' << row.test.mean_b << ',' << row.test.observed << ','
        << row.test.p_value << '\n';
  }
  out.precision(old_precision);
}

CtfidfMatrix ctfidf_scores(std::span<const std::vector<std::string>> clusters) {
  if (clusters.size() < 2) throw DataError("c-TF-IDF needs at least two clusters");
  std::vector<std::map<std::string, double>> counts(clusters.size());
  std::map<std::string, double> overall;
  double total = 0.0;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].empty()) throw DataError("c-TF-IDF: cluster " + std::to_string(c) + " has no documents");
    for (const auto& doc : clusters[c]) {
      for (const auto& tok : corpus::word_tokenize(doc)) {
        const auto term = to_lower(tok.text);
        counts[c][term] += 1.0;
        overall[term] += 1.0;
        total += 1.0;
      }
    }
  }
  if (overall.empty()) throw DataError("c-TF-IDF: clusters contain no words");
  const double average = total / static_cast<double>(clusters.size());

  CtfidfMatrix m;
  m.vocabulary.reserve(overall.size());
  std::vector<double> idf;
  for (const auto& [term, f] : overall) {
    m.vocabulary.push_back(term);
    idf.push_back(std::log(1.0 + average / f));
  }
  m.scores.assign(clusters.size(), std::vector<double>(m.vocabulary.size(), 0.0));
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (std::size_t t = 0; t < m.vocabulary.size(); ++t) {
      const auto it = counts[c].find(m.vocabulary[t]);
      if (it != counts[c].end()) m.scores[c][t] = it->second * idf[t];
    }
  }
  return m;
}

std::vector<ClusterKeywords> ctfidf(std::span<const std::vector<std::string>> clusters, std::size_t top_k) {
  const auto m = ctfidf_scores(clusters);
  std::vector<ClusterKeywords> out;
  for (std::size_t c = 0; c < m.scores.size(); ++c) {
    std::vector<std::size_t> order(m.vocabulary.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto k = std::min(top_k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (m.scores[c][a] != m.scores[c][b]) return m.scores[c][a] > m.scores[c][b];
                        return a < b;  // vocabulary is sorted
                      });
    ClusterKeywords ck{c, {}};
    for (std::size_t i = 0; i < k; ++i) ck.keywords.push_back({m.vocabulary[order[i]], m.scores[c][order[i]]});
    out.push_back(std::move(ck));
  }
  return out;
}

std::string topics_to_json(std::span<const ClusterKeywords> topics) {
  auto arr = nlohmann::json::array();
  for (const auto& t : topics) {
    auto keywords = nlohmann::json::array();
    auto scores = nlohmann::json::array();
    for (const auto& k : t.keywords) {
      keywords.push_back(k.term);
      scores.push_back(k.score);
    }
    arr.push_back({{"cluster_id", t.cluster_id}, {"keywords", keywords}, {"scores", scores}});
  }
  return arr.dump(1);
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(std::vector<double>& v) {
  const double norm = std::sqrt(dot(v, v));
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
}

}  // namespace

ClusterResult cluster_docs(std::span<const std::vector<double>> vectors, std::size_t k, std::uint64_t seed,
                           std::size_t max_iterations) {
  const std::size_t n = vectors.size();
  if (k < 2) throw DataError("cluster_docs: k must be at least 2");
  if (k > n) throw DataError("cluster_docs: k = " + std::to_string(k) + " exceeds the " + std::to_string(n) +
                             " documents");
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim) throw DataError("cluster_docs: vectors differ in dimension");
  }

  // k-means++ seeding on 1 - cosine.
  auto rng = stream_rng(seed, 0);
  std::vector<std::size_t> chosen{static_cast<std::size_t>(uniform_below(rng, n))};
  std::vector<bool> taken(n, false);
  taken[chosen[0]] = true;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (chosen.size() < k) {
    const auto& last = vectors[chosen.back()];
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], std::max(0.0, 1.0 - dot(vectors[i], last)));
      if (!taken[i]) mass += nearest[i];
    }
    std::size_t pick = n;
    if (mass > 0.0) {
      double target = uniform_unit(rng) * mass;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i] || nearest[i] <= 0.0) continue;
        pick = i;
        target -= nearest[i];
        if (target < 0.0) break;
      }
    } else {
      // Remaining points coincide with centres; pick uniformly among them.
      auto r = uniform_below(rng, n - chosen.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i] && r-- == 0) {
          pick = i;
          break;
        }
      }
    }
    chosen.push_back(pick);
    taken[pick] = true;
  }

  ClusterResult result;
  for (auto i : chosen) result.centroids.push_back(vectors[i]);
  result.assignments.assign(n, k);
  std::vector<double> fit(n, 0.0);

  for (result.iterations = 1; result.iterations <= max_iterations; ++result.iterations) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_sim = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double s = dot(vectors[i], result.centroids[c]);
        if (s > best_sim) {
          best_sim = s;
          best = c;
        }
      }
      fit[i] = best_sim;
      if (result.assignments[i] != best) {
        result.assignments[i] = best;
        changed = true;
      }
    }

    // Refill empty clusters with the worst-fitting point of a cluster that can spare one.
    std::vector<std::size_t> sizes(k, 0);
    for (auto a : result.assignments) ++sizes[a];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      std::size_t worst = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[result.assignments[i]] > 1 && (worst == n || fit[i] < fit[worst])) worst = i;
      }
      --sizes[result.assignments[worst]];
      result.assignments[worst] = c;
      fit[worst] = 1.0;
      ++sizes[c];
      changed = true;
    }

    for (std::size_t c = 0; c < k; ++c) std::fill(result.centroids[c].begin(), result.centroids[c].end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& centroid = result.centroids[result.assignments[i]];
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += vectors[i][d];
    }
    for (auto& centroid : result.centroids) normalize(centroid);

    if (!changed) {
      result.converged = true;
      break;
    }
  }
  result.iterations = std::min(result.iterations, max_iterations);
  return result;
}

std::string topic_label_prompt(std::span<const std::string> documents, std::span<const Keyword> keywords) {
  std::string docs, words;
  for (const auto& d : documents) {
    if (!docs.empty()) docs += '\n';
    docs += d;
  }
  for (const auto& k : keywords) {
    if (!words.empty()) words += ", ";
    words += k.term;
  }
  std::string prompt(kTopicLabelPrompt);
  // [KEYWORDS] comes after [DOCUMENTS]; filling it first keeps the earlier offset valid.
  prompt.replace(prompt.find("[KEYWORDS]"), 10, words);
  prompt.replace(prompt.find("[DOCUMENTS]"), 11, docs);
  return prompt;
}

}  // namespace riskev::analysis
