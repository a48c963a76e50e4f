#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "wrongsmith/corpus.hpp"
#include "wrongsmith/decode.hpp"
#include "wrongsmith/params.hpp"
#include "wrongsmith/seq2seq.hpp"
#include "wrongsmith/random.hpp"
#include "wrongsmith/tensor.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("wrongsmith-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline wrongsmith::Sentence sent(std::initializer_list<const char*> words) {
  wrongsmith::Sentence s;
  for (const char* w : words) s.tokens.emplace_back(w);
  return s;
}

inline double log_or_ninf(double p) { return p > 0 ? std::log(p) : -std::numeric_limits<double>::infinity(); }

// Step model whose next-token distribution is an explicit function of the
// prefix emitted so far.
class TableModel {
 public:
  using State = std::vector<wrongsmith::TokenId>;
  using Table = std::function<wrongsmith::Vector(const State&)>;  // probabilities

  TableModel(std::size_t vocab, Table table) : vocab_(vocab), table_(std::move(table)) {}

  State initial_state() const { return {}; }
  std::pair<wrongsmith::Vector, State> step(const State& prefix, wrongsmith::TokenId prev) const {
    State next = prefix;
    if (prev != wrongsmith::Vocabulary::kBos) next.push_back(prev);
    const wrongsmith::Vector p = table_(next);
    wrongsmith::Vector logp(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) logp[i] = log_or_ninf(p[i]);
    return {logp, next};
  }
  std::size_t vocab_size() const { return vocab_; }

 private:
  std::size_t vocab_;
  Table table_;
};

// Pseudo-random but fixed distribution for every prefix.
inline TableModel random_table_model(std::uint64_t seed, std::size_t vocab) {
  return TableModel(vocab, [seed, vocab](const TableModel::State& prefix) {
    std::uint64_t h = seed;
    for (auto t : prefix) h = wrongsmith::mix_seed(h, t + 1);
    h = wrongsmith::mix_seed(h, prefix.size() + 17);
    wrongsmith::Rng rng(h);
    wrongsmith::Vector p(vocab);
    double sum = 0.0;
    for (double& x : p) sum += (x = 0.05 + rng.uniform());
    for (double& x : p) x /= sum;
    return p;
  });
}

// Tiny corruptor with sharp random weights so decoding paths differ.
inline wrongsmith::Corruptor random_corruptor(std::uint64_t seed, std::size_t words = 4, double scale = 1.5) {
  wrongsmith::Corruptor c;
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < words; ++i) tokens.push_back("w" + std::to_string(i));
  c.vocab = wrongsmith::Vocabulary::from_tokens(tokens);
  c.params = wrongsmith::Seq2SeqParams::zeros({c.vocab.size(), 3, 4});
  wrongsmith::Rng rng(seed);
  for (auto v : wrongsmith::params::views(c.params)) wrongsmith::fill_uniform(v, rng, -scale, scale);
  return c;
}

}  // namespace testing
