#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "oracles.hpp"
#include "wrongsmith/detector.hpp"
#include "wrongsmith/params.hpp"
#include "wrongsmith/random.hpp"
#include "wrongsmith/seq2seq.hpp"

using namespace wrongsmith;
using testing::kTolerance;
using testing::random_ids;
using testing::scramble;
using testing::worst_relative_error;

TEST_SUITE("gradients") {
  TEST_CASE("seq2seq backprop matches central differences over 20 seeds") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Rng rng(seed);
      const Seq2SeqDims dims{7, 3, 4};
      Seq2SeqParams p = Seq2SeqParams::zeros(dims);
      scramble(p, rng);
      const EncodedPair pair{random_ids(rng, dims.vocab, 1, 4), random_ids(rng, dims.vocab, 0, 4)};
      const LossGradient g = pair_gradient(p, pair);
      CHECK(g.loss == doctest::Approx(loss(p, pair)).epsilon(1e-12));
      const double err = worst_relative_error<Seq2SeqParams>(
          p, g.gradient, [&](const Seq2SeqParams& q) { return loss(q, pair); });
      INFO("seed " << seed);
      CHECK(err < kTolerance);
    }
  }

  TEST_CASE("seq2seq batch gradient is the mean of pair gradients") {
    Rng rng(99);
    const Seq2SeqDims dims{6, 3, 3};
    Seq2SeqParams p = Seq2SeqParams::zeros(dims);
    scramble(p, rng);
    std::vector<EncodedPair> batch;
    for (int i = 0; i < 5; ++i) batch.push_back({random_ids(rng, 6, 1, 4), random_ids(rng, 6, 1, 4)});
    const LossGradient g = grad(p, batch);
    const double err = worst_relative_error<Seq2SeqParams>(p, g.gradient, [&](const Seq2SeqParams& q) {
      double sum = 0.0;
      for (const auto& b : batch) sum += loss(q, b);
      return sum / static_cast<double>(batch.size());
    });
    CHECK(err < kTolerance);
  }

  TEST_CASE("detector backprop matches central differences over 20 seeds") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Rng rng(seed + 1000);
      const DetectorDims dims{6, 3, 4};
      DetectorParams p = DetectorParams::zeros(dims);
      scramble(p, rng);
      EncodedLabeled ex;
      ex.tokens = random_ids(rng, dims.vocab, 1, 5);
      for (std::size_t i = 0; i < ex.tokens.size(); ++i) ex.labels.push_back(rng.bernoulli(0.4) ? Label::kIncorrect : Label::kCorrect);
      const DetectorLossGradient g = detector_example_gradient(p, ex);
      CHECK(g.loss == doctest::Approx(detector_loss(p, ex)).epsilon(1e-12));
      const double err = worst_relative_error<DetectorParams>(
          p, g.gradient, [&](const DetectorParams& q) { return detector_loss(q, ex); });
      INFO("seed " << seed);
      CHECK(err < kTolerance);
    }
  }
}
