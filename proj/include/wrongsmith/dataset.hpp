#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "wrongsmith/corpus.hpp"
#include "wrongsmith/decode.hpp"
#include "wrongsmith/seq2seq.hpp"

namespace wrongsmith {

struct BuildConfig {
  DecodeConfig decode;
  std::size_t samples_per_source = 10;
  std::size_t max_errors = 5;
  bool dedup = true;

  void validate() const;
};

// Candidate corruptions of every clean sentence, ordered by (source index,
// rank). Argmax decodes once per source; temperature sampling draws k
// samples, sample s of source i seeded from (seed, i, s); beam search keeps
// the k best distinct outputs of one beam of width max(b, k). Sources whose
// output is empty are skipped with a warning on stderr.
std::vector<ParallelPair> corrupt_corpus(const Corruptor& model, const std::vector<Sentence>& clean,
                                         const BuildConfig& config);
std::vector<ParallelPair> corrupt_corpus_serial(const Corruptor& model, const std::vector<Sentence>& clean,
                                                const BuildConfig& config);

// Candidates for one source (the per-item kernel of corrupt_corpus).
std::vector<ParallelPair> corrupt_sentence(const Corruptor& model, const Sentence& clean, std::size_t index,
                                           const BuildConfig& config);

// Labels each pair, then drops repeated (tokens, labels) instances (first
// occurrence wins, when dedup is on) and instances with more than
// max_errors incorrect tokens. Survivors keep their input order.
std::vector<LabeledSentence> build_labeled(const std::vector<ParallelPair>& pairs, const BuildConfig& config);

// (source, corruption, score) sidecar, one TAB-separated triple per line.
void write_scores_tsv(const std::vector<ParallelPair>& pairs, const std::filesystem::path& path);
std::string format_scores(const std::vector<ParallelPair>& pairs);

}  // namespace wrongsmith
