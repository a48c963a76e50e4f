#include <doctest.h>

#include <cmath>
#include <fstream>

#include "helpers.hpp"
#include "wrongsmith/decode.hpp"
#include "wrongsmith/error.hpp"
#include "wrongsmith/params.hpp"
#include "wrongsmith/seq2seq.hpp"

using namespace wrongsmith;
using testing::sent;

namespace {

double teacher_forced_accuracy(const Seq2SeqParams& p, const EncodedPair& pair) {
  const EncoderOutput enc = encode(p, pair.source);
  LstmState state = enc.final_state;
  TokenId prev = Vocabulary::kBos;
  std::vector<TokenId> gold = pair.target;
  gold.push_back(Vocabulary::kEos);
  std::size_t hits = 0;
  for (TokenId t : gold) {
    const AttentionResult att = attend(p, state.h, enc);
    const DecoderStepResult step = decoder_step(p, state, prev, att.summary);
    if (argmax(step.distribution.probs) == t) ++hits;
    state = step.state;
    prev = t;
  }
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

Corruptor two_pair_model(const std::vector<ParallelPair>& pairs, TrainConfig cfg) {
  std::vector<Sentence> corpus;
  for (const auto& p : pairs) {
    corpus.push_back(p.source);
    corpus.push_back(p.target);
  }
  Corruptor c;
  c.vocab = Vocabulary::build(corpus);
  const auto enc = c.encode_pairs(pairs);
  c.params = train(init_seq2seq(cfg.seed, {c.vocab.size(), cfg.emb_size, cfg.cell_size}), enc, enc, cfg).best;
  return c;
}

const std::vector<ParallelPair> kTwoPairs{
    {sent({"I", "want", "to", "go", "."}), sent({"I", "want", "go", "."}), {}},
    {sent({"Mary", "sees", "the", "dog", "."}), sent({"Mary", "see", "the", "dog", "."}), {}},
};

}  // namespace

TEST_SUITE("seq2seq") {
  TEST_CASE("init is seeded and bounded") {
    const Seq2SeqDims d{9, 3, 4};
    CHECK(init_seq2seq(1, d) == init_seq2seq(1, d));
    CHECK_FALSE(init_seq2seq(1, d) == init_seq2seq(2, d));
    const Seq2SeqParams p = init_seq2seq(3, d);
    for (auto v : params::views(p)) {
      for (double x : v) REQUIRE(std::abs(x) <= 0.08);
    }
    CHECK_THROWS_AS(init_seq2seq(1, {9, 3, 0}), ConfigError);
    CHECK_THROWS_AS(init_seq2seq(1, {0, 3, 4}), ConfigError);
  }

  TEST_CASE("encoder shapes and errors") {
    const Seq2SeqParams p = init_seq2seq(1, {8, 3, 5});
    const std::vector<TokenId> src{4, 5, 6};
    const EncoderOutput e = encode(p, src);
    CHECK(e.contexts.size() == 3);
    CHECK(e.contexts[0].size() == 5);
    CHECK(encode(p, src).contexts == e.contexts);
    CHECK_THROWS_AS(encode(p, std::vector<TokenId>{}), EmptyInput);
    CHECK_THROWS_AS(encode(p, std::vector<TokenId>{8}), ConfigError);
  }

  TEST_CASE("attention weights") {
    Seq2SeqParams p = init_seq2seq(2, {8, 3, 5});
    const EncoderOutput e = encode(p, std::vector<TokenId>{4, 5, 6, 7});
    const Vector h(5, 0.3);
    const AttentionResult a = attend(p, h, e);
    double sum = 0.0;
    for (double w : a.weights) sum += w;
    CHECK(std::abs(sum - 1.0) < 1e-9);

    const EncoderOutput one = encode(p, std::vector<TokenId>{4});
    const AttentionResult single = attend(p, h, one);
    CHECK(single.weights == Vector{1.0});
    CHECK(single.summary == one.contexts[0]);

    std::fill(p.attention_vector.begin(), p.attention_vector.end(), 0.0);
    const AttentionResult flat = attend(p, h, e);
    for (double w : flat.weights) CHECK(w == doctest::Approx(0.25).epsilon(1e-12));

    CHECK_THROWS_AS(attend(p, Vector(4, 0.0), e), ConfigError);
    CHECK_THROWS_AS(attend(p, h, std::vector<Vector>{}), ConfigError);
  }

  TEST_CASE("decoder step emits a distribution") {
    const Seq2SeqParams p = init_seq2seq(3, {8, 3, 5});
    const EncoderOutput e = encode(p, std::vector<TokenId>{4, 5});
    const AttentionResult a = attend(p, e.final_state.h, e);
    const DecoderStepResult r = decoder_step(p, e.final_state, Vocabulary::kBos, a.summary);
    double sum = 0.0;
    for (double x : r.distribution.probs) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
    CHECK(r.distribution.probs[Vocabulary::kEos] > 0.0);
    CHECK(decoder_step(p, e.final_state, Vocabulary::kBos, a.summary).distribution.probs == r.distribution.probs);
    CHECK_THROWS_AS(decoder_step(p, e.final_state, 8, a.summary), ConfigError);
  }

  TEST_CASE("loss of a uniform model is ln |V|") {
    const Seq2SeqParams p = Seq2SeqParams::zeros({4, 2, 3});
    const EncodedPair pair{{0, 1, 2}, {1, 2}};
    CHECK(std::abs(loss(p, pair) - std::log(4.0)) < 1e-9);
    CHECK(loss(init_seq2seq(1, {6, 2, 3}), pair) >= 0.0);
  }

  TEST_CASE("unused vocabulary rows get zero gradient; gradients are repeatable") {
    const Seq2SeqParams p = init_seq2seq(4, {10, 3, 4});
    const std::vector<EncodedPair> batch{{{4, 5}, {5, 6}}, {{6}, {4}}};
    const LossGradient g = grad(p, batch);
    for (TokenId unused : {7u, 8u, 9u}) {
      for (double x : g.gradient.source_embedding.row(unused)) CHECK(x == 0.0);
      for (double x : g.gradient.target_embedding.row(unused)) CHECK(x == 0.0);
    }
    CHECK(grad(p, batch).gradient == g.gradient);
  }

  TEST_CASE("serial and OpenMP kernels agree bit for bit") {
    const Seq2SeqParams p = init_seq2seq(5, {12, 4, 6});
    Rng rng(6);
    std::vector<EncodedPair> batch;
    for (int i = 0; i < 23; ++i) {
      EncodedPair e;
      for (std::uint64_t k = 0, n = 1 + rng.below(6); k < n; ++k) e.source.push_back(4 + rng.below(8));
      for (std::uint64_t k = 0, n = rng.below(6); k < n; ++k) e.target.push_back(4 + rng.below(8));
      batch.push_back(e);
    }
    const LossGradient a = grad(p, batch);
    const LossGradient b = grad_serial(p, batch);
    CHECK(a.loss == b.loss);
    CHECK(a.gradient == b.gradient);
    CHECK(mean_loss(p, batch) == mean_loss_serial(p, batch));
  }

  TEST_CASE("early stopping with patience 1 stops after the first non-improving epoch") {
    // Training pushes a -> b while dev wants a -> c, so dev loss soon worsens.
    const std::vector<EncodedPair> train_set{{{4}, {5}}};
    const std::vector<EncodedPair> dev_set{{{4}, {6}}};
    TrainConfig cfg;
    cfg.patience = 1;
    cfg.learning_rate = 1.0;
    cfg.batch_size = 1;
    cfg.cell_size = 4;
    cfg.emb_size = 3;
    const Seq2SeqParams init = init_seq2seq(7, {7, 3, 4});
    const TrainResult r = train(init, train_set, dev_set, cfg);
    REQUIRE(r.history.size() >= 2);
    const std::size_t n = r.history.size();
    CHECK(r.history[n - 1].dev_loss >= r.history[n - 2].dev_loss);
    for (std::size_t k = 1; k + 1 < n; ++k) CHECK(r.history[k].dev_loss < r.history[k - 1].dev_loss);
    CHECK(r.best_epoch == n - 1);
    cfg.max_epochs = r.best_epoch;
    CHECK(train(init, train_set, dev_set, cfg).best == r.best);
  }

  TEST_CASE("EarlyStopping counts epochs since the best score") {
    EarlyStopping s(2, true);
    CHECK(s.observe(3.0));
    CHECK_FALSE(s.observe(3.0));
    CHECK_FALSE(s.should_stop());
    CHECK_FALSE(s.observe(4.0));
    CHECK(s.should_stop());
    EarlyStopping up(1, false);
    CHECK(up.observe(0.1));
    CHECK(up.observe(0.2));
    CHECK(up.best_index() == 1);
  }

  TEST_CASE("training configuration and input errors") {
    TrainConfig cfg;
    CHECK(cfg.patience == 20);
    CHECK(cfg.cell_size == 64);
    cfg.patience = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.learning_rate = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    const Seq2SeqParams p = init_seq2seq(1, {6, 2, 3});
    const std::vector<EncodedPair> some{{{4}, {5}}};
    CHECK_THROWS_AS(train(p, {}, some, TrainConfig{}), EmptyInput);
    CHECK_THROWS_AS(train(p, some, {}, TrainConfig{}), EmptyInput);
  }

  TEST_CASE("two-pair corpus is memorised and decoded back") {
    TrainConfig cfg;
    cfg.cell_size = 16;
    cfg.emb_size = 8;
    cfg.learning_rate = 1.0;
    cfg.batch_size = 1;
    cfg.max_epochs = 1000;
    cfg.patience = 1000;
    const Corruptor model = two_pair_model(kTwoPairs, cfg);
    for (const ParallelPair& pair : kTwoPairs) {
      const EncodedPair e = model.encode_pair(pair);
      CHECK(loss(model.params, e) < 0.05);
      CHECK(teacher_forced_accuracy(model.params, e) >= 0.95);
      CHECK(greedy_decode(model, pair.source, DecodeConfig{}).sentence == pair.target);
    }
  }

  TEST_CASE("training is deterministic") {
    TrainConfig cfg;
    cfg.cell_size = 6;
    cfg.emb_size = 4;
    cfg.max_epochs = 5;
    cfg.batch_size = 1;
    Corruptor c;
    c.vocab = Vocabulary::build({kTwoPairs[0].source, kTwoPairs[0].target, kTwoPairs[1].source, kTwoPairs[1].target});
    const auto enc = c.encode_pairs(kTwoPairs);
    const auto init = init_seq2seq(9, {c.vocab.size(), 4, 6});
    const TrainResult a = train(init, enc, enc, cfg);
    const TrainResult b = train(init, enc, enc, cfg);
    CHECK(a.history == b.history);
    CHECK(a.best == b.best);
    CHECK(params::finite(a.best));
  }

  TEST_CASE("model file round-trip and validation") {
    testing::TempDir dir;
    Corruptor c;
    c.vocab = Vocabulary::build({sent({"b", "a", "a"})});
    c.params = init_seq2seq(3, {c.vocab.size(), 2, 3});
    save_corruptor(c, dir / "m.bin");
    const Corruptor back = load_corruptor(dir / "m.bin");
    CHECK(back.vocab == c.vocab);
    CHECK(back.params == c.params);
    CHECK(serialize_corruptor(back) == serialize_corruptor(c));
    std::ifstream raw(dir / "m.bin", std::ios::binary);
    char magic[4];
    raw.read(magic, 4);
    CHECK(std::string(magic, 4) == "WSM1");

    std::string bytes = serialize_corruptor(c);
    CHECK_THROWS_AS(deserialize_corruptor(bytes.substr(0, bytes.size() - 3)), ConfigError);
    bytes[0] = 'X';
    CHECK_THROWS_AS(deserialize_corruptor(bytes), ConfigError);
    CHECK_THROWS_AS(load_corruptor(dir / "missing.bin"), IoError);
  }
}
