#include <doctest.h>

#include <algorithm>
#include <functional>
#include <iterator>

#include "helpers.hpp"
#include "oracles.hpp"
#include "wrongsmith/align.hpp"
#include "wrongsmith/error.hpp"

using namespace wrongsmith;
using testing::brute_distance;
using testing::all_sentences;
using testing::sent;

namespace {

std::vector<Label> labels(const char* spec) {
  std::vector<Label> out;
  for (const char* c = spec; *c; ++c) out.push_back(*c == 'i' ? Label::kIncorrect : Label::kCorrect);
  return out;
}

void check_alignment_shape(const Sentence& u, const Sentence& v, const Alignment& a) {
  std::size_t i = 0, j = 0, cost = 0;
  for (const EditOp& op : a.ops) {
    switch (op.kind) {
      case EditKind::kMatch:
        REQUIRE(op.source == i++);
        REQUIRE(op.target == j++);
        REQUIRE(u.tokens[op.source] == v.tokens[op.target]);
        break;
      case EditKind::kSubstitute:
        REQUIRE(op.source == i++);
        REQUIRE(op.target == j++);
        REQUIRE(u.tokens[op.source] != v.tokens[op.target]);
        ++cost;
        break;
      case EditKind::kDelete:
        REQUIRE(op.source == i++);
        ++cost;
        break;
      case EditKind::kInsert:
        REQUIRE(op.target == j++);
        ++cost;
        break;
    }
  }
  REQUIRE(i == u.size());
  REQUIRE(j == v.size());
  REQUIRE(cost == a.cost);
}

}  // namespace

TEST_SUITE("align") {
  TEST_CASE("identity aligns with matches only") {
    const Sentence u = tokenize("She promised to turn over a new leaf.");
    const Alignment a = word_align(u, u);
    CHECK(a.cost == 0);
    CHECK(std::all_of(a.ops.begin(), a.ops.end(), [](const EditOp& op) { return op.kind == EditKind::kMatch; }));
    CHECK(count_errors(label_tokens(u, u)) == 0);
  }

  TEST_CASE("example sentence row 1: one substitution") {
    const Sentence u = tokenize("She promised to turn over a new leaf.");
    const Sentence v = tokenize("She promissed to turn over a new leaf.");
    const Alignment a = word_align(u, v);
    CHECK(a.cost == 1);
    CHECK(a.cost == brute_distance(u, v));
    REQUIRE(a.ops.size() == 9);
    CHECK(a.ops[1] == EditOp{EditKind::kSubstitute, 1, 1});
    for (std::size_t k = 0; k < a.ops.size(); ++k) {
      if (k != 1) CHECK(a.ops[k].kind == EditKind::kMatch);
    }
    const LabeledSentence l = label_tokens(u, v);
    CHECK(l.labels == labels("ciccccccc"));
    CHECK(count_errors(l) == 1);
  }

  TEST_CASE("example sentence row 2") {
    const LabeledSentence l =
        label_tokens(tokenize("At the moment I'm in Spain."), tokenize("During the moment I'm in Spain."));
    CHECK(l.labels == labels("icccccc"));
  }

  TEST_CASE("deletion is forced") {
    const Alignment a = word_align(sent({"a", "b", "c"}), sent({"a", "c"}));
    CHECK(a.cost == 1);
    REQUIRE(a.ops.size() == 3);
    CHECK(a.ops[1] == EditOp{EditKind::kDelete, 1, EditOp::kNone});
  }

  TEST_CASE("word following a gap is incorrect") {
    CHECK(label_tokens(sent({"I", "want", "to", "go"}), sent({"I", "want", "go"})).labels == labels("cci"));
  }

  TEST_CASE("abrupt ending is incorrect") {
    CHECK(label_tokens(sent({"I", "want", "to", "go"}), sent({"I", "want", "to"})).labels == labels("cci"));
  }

  TEST_CASE("inserted words and case changes are incorrect") {
    CHECK(label_tokens(sent({"I", "go", "."}), sent({"I", "do", "go", "."})).labels == labels("cicc"));
    CHECK(label_tokens(sent({"the", "dog"}), sent({"The", "dog"})).labels == labels("ic"));
  }

  TEST_CASE("count_errors") {
    CHECK(count_errors({{"a", "b", "c"}, labels("ccc")}) == 0);
    CHECK(count_errors({{"a", "b", "c"}, labels("cii")}) == 2);
  }

  TEST_CASE("empty input is rejected") {
    CHECK_THROWS_AS(word_align(Sentence{}, sent({"a"})), EmptyInput);
    CHECK_THROWS_AS(label_tokens(sent({"a"}), Sentence{}), EmptyInput);
  }

  TEST_CASE("cost matches brute-force recursion on every pair up to length 6") {
    const auto all = all_sentences(6);  // 1092 sequences over {x, y, z}
    std::size_t checked = 0;
    for (const Sentence& u : all) {
      for (const Sentence& v : all) {
        const Alignment al = word_align(u, v);
        REQUIRE(al.cost == brute_distance(u, v));
        ++checked;
      }
    }
    CHECK(checked == 1092 * 1092);
  }

  TEST_CASE("alignment ops are monotone and complete on short pairs") {
    const auto all = all_sentences(4);
    for (const Sentence& u : all) {
      for (const Sentence& v : all) {
        check_alignment_shape(u, v, word_align(u, v));
        REQUIRE(edit_distance(u, v) == word_align(u, v).cost);
        REQUIRE(label_tokens(u, v).labels.size() == v.size());
      }
    }
  }

  TEST_CASE("fuzz: 10k random pairs keep alignment monotone and labels sized") {
    Rng rng(2024);
    for (int n = 0; n < 10000; ++n) {
      Sentence u, v;
      const auto lu = 1 + rng.below(9), lv = 1 + rng.below(9);
      for (std::uint64_t k = 0; k < lu; ++k) u.tokens.push_back(std::string(1, static_cast<char>('a' + rng.below(5))));
      for (std::uint64_t k = 0; k < lv; ++k) v.tokens.push_back(std::string(1, static_cast<char>('a' + rng.below(5))));
      check_alignment_shape(u, v, word_align(u, v));
      const LabeledSentence l = label_tokens(u, v);
      REQUIRE(l.tokens == v.tokens);
      REQUIRE(count_errors(l) <= v.size());
      REQUIRE(count_errors(label_tokens(u, u)) == 0);
    }
  }
}
