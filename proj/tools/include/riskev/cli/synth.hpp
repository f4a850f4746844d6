#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "riskev/corpus.hpp"

namespace riskev::cli {

/// Generator for stand-in corpora. At-risk users (labels b, c, d) mix
/// distress sentences into neutral filler, the others mix in everyday
/// positive sentences, so a classifier has something to find.
struct SynthOptions {
  std::size_t users = 125;
  std::size_t min_posts = 1;
  std::size_t max_posts = 4;
  std::size_t min_sentences = 3;
  std::size_t max_sentences = 8;
  double risk_fraction = 0.75;
  /// Probability that a sentence carries the class signal.
  double signal_rate = 0.35;
  bool titles = true;
  std::uint64_t seed = 0;
  std::string user_prefix = "u";
};

corpus::Corpus synthetic_corpus(const SynthOptions& options);

struct LabeledDocs {
  std::vector<std::string> docs;
  std::vector<int> labels;
};

/// Balanced documents that are linearly separable through class-specific
/// bigrams embedded in shared filler text.
LabeledDocs separable_documents(std::size_t n, std::uint64_t seed);

}  // namespace riskev::cli
