#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "riskev/cli/synth.hpp"
#include "riskev/corpus.hpp"
#include "riskev/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write a synthetic corpus in the riskev JSONL schema"};
  riskev::cli::SynthOptions o;
  std::string out;
  app.add_option("-o,--output", out, "Output .jsonl file")->required();
  app.add_option("--users", o.users, "Number of users");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--min-posts", o.min_posts);
  app.add_option("--max-posts", o.max_posts);
  app.add_option("--risk-fraction", o.risk_fraction, "Share of at-risk users")->check(CLI::Range(0.0, 1.0));
  app.add_option("--signal-rate", o.signal_rate, "Share of sentences carrying the class signal")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--prefix", o.user_prefix, "User id prefix");
  CLI11_PARSE(app, argc, argv);
  try {
    const auto corpus = riskev::cli::synthetic_corpus(o);
    riskev::corpus::save_jsonl(corpus, out);
    std::printf("%zu users, %zu posts -> %s\n", corpus.users.size(), corpus.post_count(), out.c_str());
  } catch (const riskev::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
