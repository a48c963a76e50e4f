#pragma once

#include <cstddef>
#include <vector>

#include "wrongsmith/corpus.hpp"

namespace wrongsmith {

enum class EditKind { kMatch, kSubstitute, kDelete, kInsert };

// One step of a word alignment. Delete consumes only a source word, Insert
// only a target word; the unused index is kNone.
struct EditOp {
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  EditKind kind;
  std::size_t source = kNone;
  std::size_t target = kNone;

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct Alignment {
  std::vector<EditOp> ops;
  std::size_t cost = 0;
};

// Minimal word-level Levenshtein alignment with unit costs and exact,
// case-sensitive token equality. Among minimal alignments the backtrace
// (from the end) prefers Match, then Substitute, Delete, Insert.
// Throws EmptyInput when either side is empty.
Alignment word_align(const Sentence& source, const Sentence& target);

// Edit distance only; same DP as word_align.
std::size_t edit_distance(const Sentence& source, const Sentence& target);

// Labels every target word:
//   'i' if it is not aligned to an identical source word;
//   else 'i' if the alignment op just before it is a Delete;
//   else 'i' if it is the last word but not aligned to the last source word;
//   else 'c'.
LabeledSentence label_tokens(const Sentence& source, const Sentence& target);
LabeledSentence label_alignment(const Sentence& source, const Sentence& target, const Alignment& alignment);

std::size_t count_errors(const LabeledSentence& sentence);

}  // namespace wrongsmith
