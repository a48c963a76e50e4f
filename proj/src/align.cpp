#include "wrongsmith/align.hpp"

#include <algorithm>

#include "wrongsmith/error.hpp"

namespace wrongsmith {
namespace {

// (|u|+1) x (|v|+1) table of prefix edit distances.
std::vector<std::size_t> distance_table(const Sentence& u, const Sentence& v) {
  const std::size_t n = u.size();
  const std::size_t m = v.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (u.tokens[i - 1] == v.tokens[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  return d;
}

}  // namespace

std::size_t edit_distance(const Sentence& source, const Sentence& target) {
  if (source.empty() || target.empty()) throw EmptyInput("alignment needs two non-empty sentences");
  return distance_table(source, target).back();
}

Alignment word_align(const Sentence& source, const Sentence& target) {
  if (source.empty() || target.empty()) throw EmptyInput("alignment needs two non-empty sentences");
  const std::size_t m = target.size();
  const auto d = distance_table(source, target);
  auto at = [&](std::size_t i, std::size_t j) { return d[i * (m + 1) + j]; };

  Alignment a;
  a.cost = at(source.size(), m);
  std::size_t i = source.size();
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::size_t here = at(i, j);
    if (i > 0 && j > 0) {
      const bool same = source.tokens[i - 1] == target.tokens[j - 1];
      if (same && here == at(i - 1, j - 1)) {
        a.ops.push_back({EditKind::kMatch, i - 1, j - 1});
        --i, --j;
        continue;
      }
      if (!same && here == at(i - 1, j - 1) + 1) {
        a.ops.push_back({EditKind::kSubstitute, i - 1, j - 1});
        --i, --j;
        continue;
      }
    }
    if (i > 0 && here == at(i - 1, j) + 1) {
      a.ops.push_back({EditKind::kDelete, i - 1, EditOp::kNone});
      --i;
      continue;
    }
    a.ops.push_back({EditKind::kInsert, EditOp::kNone, j - 1});
    --j;
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

LabeledSentence label_alignment(const Sentence& source, const Sentence& target, const Alignment& alignment) {
  LabeledSentence out;
  out.tokens = target.tokens;
  out.labels.assign(target.size(), Label::kCorrect);
  const std::size_t last_source = source.size() - 1;
  const std::size_t last_target = target.size() - 1;
  for (std::size_t k = 0; k < alignment.ops.size(); ++k) {
    const EditOp& op = alignment.ops[k];
    if (op.kind == EditKind::kDelete) continue;
    const std::size_t j = op.target;
    Label label = Label::kCorrect;
    if (op.kind != EditKind::kMatch || source.tokens[op.source] != target.tokens[j]) {
      label = Label::kIncorrect;
    } else if (k > 0 && alignment.ops[k - 1].kind == EditKind::kDelete) {
      label = Label::kIncorrect;
    } else if (j == last_target && op.source != last_source) {
      label = Label::kIncorrect;
    }
    out.labels[j] = label;
  }
  return out;
}

LabeledSentence label_tokens(const Sentence& source, const Sentence& target) {
  return label_alignment(source, target, word_align(source, target));
}

std::size_t count_errors(const LabeledSentence& sentence) {
  return static_cast<std::size_t>(std::count(sentence.labels.begin(), sentence.labels.end(), Label::kIncorrect));
}

}  // namespace wrongsmith
