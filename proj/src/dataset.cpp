#include "wrongsmith/dataset.hpp"

#include <cstdio>
#include <iostream>
#include <set>

#include "wrongsmith/align.hpp"
#include "wrongsmith/error.hpp"
#include "wrongsmith/parallel.hpp"
#include "wrongsmith/random.hpp"

namespace wrongsmith {

void BuildConfig::validate() const {
  decode.validate();
  if (samples_per_source < 1) throw ConfigError("samples per source must be >= 1");
}

std::vector<ParallelPair> corrupt_sentence(const Corruptor& model, const Sentence& clean, std::size_t index,
                                           const BuildConfig& config) {
  std::vector<ParallelPair> out;
  const auto emit = [&](Corruption c) {
    if (c.sentence.empty()) return;
    out.push_back({clean, std::move(c.sentence), c.log_prob});
  };
  switch (config.decode.strategy) {
    case Strategy::kArgmax:
      emit(greedy_decode(model, clean, config.decode));
      break;
    case Strategy::kTemperature:
      for (std::size_t s = 0; s < config.samples_per_source; ++s) {
        DecodeConfig sample = config.decode;
        sample.seed = mix_seed(config.decode.seed, index, s);
        emit(temperature_decode(model, clean, sample));
      }
      break;
    case Strategy::kBeam: {
      DecodeConfig beam = config.decode;
      beam.beam_width = std::max(config.decode.beam_width, config.samples_per_source);
      std::set<std::vector<std::string>> seen;
      for (Corruption& c : beam_decode(model, clean, beam)) {
        if (out.size() == config.samples_per_source) break;
        if (!seen.insert(c.sentence.tokens).second) continue;
        emit(std::move(c));
      }
      break;
    }
  }
  return out;
}

namespace {

std::vector<ParallelPair> flatten(const std::vector<Sentence>& clean, std::vector<std::vector<ParallelPair>> parts) {
  std::vector<ParallelPair> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].empty()) {
      std::cerr << "warning: no corruption produced for source " << i << " (" << join(clean[i]) << ")\n";
    }
    for (ParallelPair& p : parts[i]) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<ParallelPair> corrupt_corpus(const Corruptor& model, const std::vector<Sentence>& clean,
                                         const BuildConfig& config) {
  config.validate();
  return flatten(clean, parallel::map(clean.size(), [&](std::size_t i) {
    return corrupt_sentence(model, clean[i], i, config);
  }));
}

std::vector<ParallelPair> corrupt_corpus_serial(const Corruptor& model, const std::vector<Sentence>& clean,
                                                const BuildConfig& config) {
  config.validate();
  return flatten(clean, parallel::map_serial(clean.size(), [&](std::size_t i) {
    return corrupt_sentence(model, clean[i], i, config);
  }));
}

std::vector<LabeledSentence> build_labeled(const std::vector<ParallelPair>& pairs, const BuildConfig& config) {
  std::vector<LabeledSentence> out;
  std::set<std::pair<std::vector<std::string>, std::vector<Label>>> seen;
  for (const ParallelPair& pair : pairs) {
    LabeledSentence labeled = label_tokens(pair.source, pair.target);
    if (count_errors(labeled) > config.max_errors) continue;
    if (config.dedup && !seen.insert({labeled.tokens, labeled.labels}).second) continue;
    out.push_back(std::move(labeled));
  }
  return out;
}

std::string format_scores(const std::vector<ParallelPair>& pairs) {
  std::string out;
  char buf[64];
  for (const ParallelPair& p : pairs) {
    out += join(p.source);
    out += '\t';
    out += join(p.target);
    out += '\t';
    if (p.score) {
      std::snprintf(buf, sizeof buf, "%.9f", *p.score);
      out += buf;
    } else {
      out += "NA";
    }
    out += '\n';
  }
  return out;
}

void write_scores_tsv(const std::vector<ParallelPair>& pairs, const std::filesystem::path& path) {
  write_text_file(path, format_scores(pairs));
}

}  // namespace wrongsmith
