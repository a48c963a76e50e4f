#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wrongsmith/corpus.hpp"
#include "wrongsmith/random.hpp"

// A small probabilistic grammar of English-like sentences with number
// agreement, plus a rule-based injector of learner-style errors. Stands in
// for a licensed learner corpus in the desk-scale experiment.
namespace wrongsmith::toy {

enum class Pos { kDeterminer, kAdjective, kNoun, kName, kVerb, kPreposition, kPunct };

struct Word {
  std::string text;
  Pos pos = Pos::kPunct;
  int lemma = -1;  // index into the relevant lexicon table
  bool plural = false;
};

using Parse = std::vector<Word>;

Parse generate(Rng& rng);
Sentence surface(const Parse& parse);

struct ErrorRates {
  double agreement_after_name = 0.6;  // "Mary see the dog ."
  double agreement = 0.1;
  double number_after_quantifier = 0.55;  // "many dog"
  double number = 0.04;
  double determiner_drop = 0.1;
  double preposition_swap = 0.25;
  double preposition_drop = 0.06;
};

// Applies each error rule independently at every eligible site.
Sentence inject_errors(const Parse& parse, Rng& rng, const ErrorRates& rates = {});

struct Split {
  std::vector<ParallelPair> corruptor_train;  // (clean, erroneous)
  std::vector<ParallelPair> corruptor_dev;
  std::vector<LabeledSentence> real_train;
  std::vector<LabeledSentence> real_dev;
  std::vector<LabeledSentence> test;
  std::vector<Sentence> clean_pool;  // error-free text to corrupt
};

struct SplitSizes {
  std::size_t corruptor_train = 1000;
  std::size_t corruptor_dev = 100;
  std::size_t real_train = 300;
  std::size_t real_dev = 100;
  std::size_t test = 400;
  std::size_t clean_pool = 1200;
};

Split make_split(std::uint64_t seed, const SplitSizes& sizes = {}, const ErrorRates& rates = {});

}  // namespace wrongsmith::toy
