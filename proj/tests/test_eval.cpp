#include <doctest.h>

#include <cmath>

#include "wrongsmith/error.hpp"
#include "wrongsmith/eval.hpp"
#include "wrongsmith/random.hpp"

using namespace wrongsmith;

namespace {

LabeledSentence ls(const char* labels) {
  LabeledSentence s;
  for (const char* c = labels; *c; ++c) {
    s.tokens.emplace_back("w");
    s.labels.push_back(*c == 'i' ? Label::kIncorrect : Label::kCorrect);
  }
  return s;
}

// 50 synthetic + 50 real items; the annotator flags 13 synthetic and 3 real.
std::pair<std::vector<std::pair<std::string, bool>>, std::vector<std::pair<std::string, bool>>> thirteen_of_fifty_flags() {
  std::vector<std::pair<std::string, bool>> key, judgments;
  for (int i = 0; i < 100; ++i) key.emplace_back("item" + std::to_string(i), i < 50);
  for (int i = 0; i < 13; ++i) judgments.emplace_back("item" + std::to_string(i), true);
  for (int i = 50; i < 53; ++i) judgments.emplace_back("item" + std::to_string(i), true);
  for (int i = 60; i < 70; ++i) judgments.emplace_back("item" + std::to_string(i), false);
  return {judgments, key};
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("perfect prediction") {
    const std::vector<LabeledSentence> gold{ls("cci"), ls("icc")};
    const DetectionMetrics m = prf(gold, gold, 0.5);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f == 1.0);
    CHECK(m.tp == 2);
  }

  TEST_CASE("counts and zero-division conventions") {
    const std::vector<LabeledSentence> gold{ls("ciic"), ls("cc")};
    const std::vector<LabeledSentence> pred{ls("icic"), ls("ci")};
    const DetectionMetrics m = prf(pred, gold, 1.0);
    CHECK(m.tp == 1);
    CHECK(m.fp == 2);
    CHECK(m.fn == 1);
    CHECK(m.precision == doctest::Approx(1.0 / 3));
    CHECK(m.recall == doctest::Approx(0.5));

    const DetectionMetrics none = prf({ls("cc")}, {ls("ci")}, 0.5);
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f == 0.0);
    const DetectionMetrics empty = prf({ls("cc")}, {ls("cc")}, 0.5);
    CHECK(empty.f == 0.0);
  }

  TEST_CASE("shape errors name the sentence") {
    try {
      prf({ls("cc"), ls("c")}, {ls("cc"), ls("cc")}, 0.5);
      FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
      CHECK(e.index() == 1);
    }
    CHECK_THROWS_AS(prf({ls("c")}, {ls("c"), ls("c")}, 0.5), ShapeError);
    CHECK_THROWS_AS(prf({ls("c")}, {ls("c")}, 0.0), ConfigError);
  }

  TEST_CASE("F1 of 13 true and 3 false flags out of 50") {
    CHECK(std::abs(f_beta(0.8125, 0.26, 1.0) - 0.3939) < 1e-4);
  }

  TEST_CASE("score_turing reproduces 81.25 / 26.00 / 39.39") {
    const auto [judgments, key] = thirteen_of_fifty_flags();
    const DetectionMetrics m = score_turing(judgments, key);
    CHECK(m.tp == 13);
    CHECK(m.fp == 3);
    CHECK(m.fn == 37);
    CHECK(m.beta == 1.0);
    CHECK(std::abs(100 * m.precision - 81.25) < 1e-9);
    CHECK(std::abs(100 * m.recall - 26.00) < 1e-9);
    CHECK(std::abs(100 * m.f - 39.39) < 0.01);
    CHECK(metrics_human(m) == "P 81.25 / R 26.00 / F1 39.39 (tp 13, fp 3, fn 37)");
  }

  TEST_CASE("score_turing edge cases") {
    const auto [judgments, key] = thirteen_of_fifty_flags();
    CHECK(score_turing({}, key).f == 0.0);
    std::vector<std::pair<std::string, bool>> exact;
    for (const auto& [id, synthetic] : key) {
      if (synthetic) exact.emplace_back(id, true);
    }
    CHECK(score_turing(exact, key).f == 1.0);
    CHECK_THROWS_AS(score_turing({{"nope", true}}, key), KeyError);
    // The later judgment of an item wins.
    CHECK(score_turing({{"item0", true}, {"item0", false}}, key).tp == 0);
    CHECK(score_turing({{"item50", true}, {"item50", false}, {"item1", true}}, key).fp == 0);
  }

  TEST_CASE("F-beta properties") {
    Rng rng(5);
    for (int n = 0; n < 1000; ++n) {
      const double p = rng.uniform(0.01, 1.0), r = rng.uniform(0.01, 1.0);
      const double f05 = f_beta(p, r, 0.5), f1 = f_beta(p, r, 1.0);
      CHECK(f05 >= std::min(p, r) - 1e-12);
      CHECK(f05 <= std::max(p, r) + 1e-12);
      if (p > r) CHECK(f05 > f1);
      CHECK(f_beta(p, p, rng.uniform(0.1, 3.0)) == doctest::Approx(p).epsilon(1e-12));
      const DetectionMetrics m = DetectionMetrics::from_counts(7, 3, 11, 0.5);
      CHECK(m.f == doctest::Approx(1.25 * m.precision * m.recall / (0.25 * m.precision + m.recall)).epsilon(1e-12));
    }
  }

  TEST_CASE("prf is invariant to joint permutation") {
    const std::vector<LabeledSentence> gold{ls("ciic"), ls("cc"), ls("iic")};
    const std::vector<LabeledSentence> pred{ls("icic"), ls("ci"), ls("iii")};
    const DetectionMetrics a = prf(pred, gold, 0.5);
    const DetectionMetrics b = prf({pred[2], pred[0], pred[1]}, {gold[2], gold[0], gold[1]}, 0.5);
    CHECK(a.tp == b.tp);
    CHECK(a.f == b.f);
  }

  TEST_CASE("metrics JSON") {
    const DetectionMetrics m = DetectionMetrics::from_counts(13, 3, 37, 1.0);
    const std::string json = metrics_json(m);
    CHECK(json.find("\"precision\":") == 1);
    const DetectionMetrics back = parse_metrics_json(json);
    CHECK(back.precision == m.precision);
    CHECK(back.recall == m.recall);
    CHECK(back.f == m.f);
    CHECK(back.beta == m.beta);
    CHECK(back.tp == 13);
    CHECK(back.fn == 37);
    CHECK_THROWS_AS(parse_metrics_json("{"), ParseError);
  }
}
