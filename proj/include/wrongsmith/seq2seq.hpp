#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wrongsmith/corpus.hpp"
#include "wrongsmith/lstm.hpp"
#include "wrongsmith/tensor.hpp"

namespace wrongsmith {

struct Seq2SeqDims {
  std::size_t vocab = 0;
  std::size_t emb = 0;
  std::size_t cell = 0;

  friend bool operator==(const Seq2SeqDims&, const Seq2SeqDims&) = default;
};

// Attentive encoder-decoder. Encoder: one forward LSTM over source
// embeddings. Decoder: one LSTM over [target embedding; attention summary],
// started from the encoder's final state. Attention is additive:
//   score_j = v . tanh(W_s h + W_c context_j).
struct Seq2SeqParams {
  Matrix source_embedding;   // V x E
  Matrix target_embedding;   // V x E
  LstmWeights encoder;       // input E
  LstmWeights decoder;       // input E + H
  Matrix attention_state;    // H x H
  Matrix attention_context;  // H x H
  Vector attention_vector;   // H
  Matrix output_weights;     // V x H
  Vector output_bias;        // V

  // All-zero parameters of the given shape. Throws ConfigError on a zero dim.
  static Seq2SeqParams zeros(const Seq2SeqDims& dims);

  Seq2SeqDims dims() const { return {output_weights.rows, source_embedding.cols, encoder.hidden()}; }

  template <class Self, class F>
  static void visit(Self& self, F&& f) {
    f("source_embedding", self.source_embedding.data);
    f("target_embedding", self.target_embedding.data);
    LstmWeights::visit(self.encoder, "encoder", f);
    LstmWeights::visit(self.decoder, "decoder", f);
    f("attention_state", self.attention_state.data);
    f("attention_context", self.attention_context.data);
    f("attention_vector", self.attention_vector);
    f("output_weights", self.output_weights.data);
    f("output_bias", self.output_bias);
  }

  friend bool operator==(const Seq2SeqParams&, const Seq2SeqParams&) = default;
};

// Every weight drawn from Uniform(-0.08, 0.08) with a seeded xoshiro256**.
Seq2SeqParams init_seq2seq(std::uint64_t seed, const Seq2SeqDims& dims);

// Probabilities over the target vocabulary, with their logs kept alongside
// so beam scores do not lose precision on tiny probabilities.
struct Distribution {
  Vector probs;
  Vector log_probs;

  static Distribution from_logits(std::span<const double> logits);
  static Distribution from_probs(std::span<const double> probs);
};

struct EncoderOutput {
  std::vector<Vector> contexts;  // one per source token
  std::vector<Vector> keys;      // W_c * context_j, cached for attention
  LstmState final_state;
};

// Throws EmptyInput for an empty source, ConfigError for an id >= vocab.
EncoderOutput encode(const Seq2SeqParams& params, std::span<const TokenId> source);

struct AttentionResult {
  Vector weights;
  Vector summary;
};

AttentionResult attend(const Seq2SeqParams& params, std::span<const double> decoder_h, const EncoderOutput& encoded);
// Convenience overload computing the attention keys from raw contexts.
AttentionResult attend(const Seq2SeqParams& params, std::span<const double> decoder_h,
                       const std::vector<Vector>& contexts);

struct DecoderStepResult {
  Distribution distribution;
  LstmState state;
};

DecoderStepResult decoder_step(const Seq2SeqParams& params, const LstmState& state, TokenId prev_token,
                               std::span<const double> summary);

// Source and target as token ids; the target excludes BOS/EOS.
struct EncodedPair {
  std::vector<TokenId> source;
  std::vector<TokenId> target;
};

// Teacher-forced mean per-token negative log-likelihood over target + EOS.
double loss(const Seq2SeqParams& params, const EncodedPair& pair);

// Sum of log p(output_j) teacher-forced from BOS. `output` may end in EOS.
double sequence_log_prob(const Seq2SeqParams& params, std::span<const TokenId> source,
                         std::span<const TokenId> output);

// Attention weights of each decoder step when teacher-forcing `output`.
std::vector<Vector> attention_trace(const Seq2SeqParams& params, std::span<const TokenId> source,
                                    std::span<const TokenId> output);

struct LossGradient {
  double loss = 0.0;
  Seq2SeqParams gradient;
};

// Exact backpropagation of loss(params, pair).
LossGradient pair_gradient(const Seq2SeqParams& params, const EncodedPair& pair);

// Gradient of the mean loss over `batch`. Per-pair gradients are summed in
// batch order, so the OpenMP and serial kernels agree bit for bit.
LossGradient grad(const Seq2SeqParams& params, std::span<const EncodedPair> batch);
LossGradient grad_serial(const Seq2SeqParams& params, std::span<const EncodedPair> batch);

// Mean of loss() over pairs (the dev score).
double mean_loss(const Seq2SeqParams& params, std::span<const EncodedPair> pairs);
double mean_loss_serial(const Seq2SeqParams& params, std::span<const EncodedPair> pairs);

struct TrainConfig {
  std::size_t cell_size = 64;
  std::size_t emb_size = 32;
  double learning_rate = 0.5;
  std::size_t batch_size = 16;
  std::size_t patience = 20;
  std::size_t max_epochs = 200;
  double clip_norm = 5.0;
  std::uint64_t seed = 1;

  // Throws ConfigError on patience < 1, learning_rate <= 0 and zero sizes.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double dev_loss = 0.0;
  bool improved = false;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainResult {
  Seq2SeqParams best;
  std::size_t best_epoch = 0;
  std::vector<EpochRecord> history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Shuffled minibatch SGD with gradient clipping. Keeps the parameters of the
// best dev epoch and stops after `patience` epochs without improvement.
// Throws EmptyInput on an empty training or dev set.
TrainResult train(Seq2SeqParams params, std::span<const EncodedPair> train_pairs,
                  std::span<const EncodedPair> dev_pairs, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Tracks the best score seen so far and how long ago it was.
class EarlyStopping {
 public:
  EarlyStopping(std::size_t patience, bool lower_is_better)
      : patience_(patience), lower_is_better_(lower_is_better) {}

  // Returns true when `score` strictly improves on the best so far.
  bool observe(double score);
  bool should_stop() const { return since_best_ >= patience_; }
  double best() const { return best_; }
  std::size_t observations() const { return seen_; }
  std::size_t best_index() const { return best_index_; }

 private:
  std::size_t patience_;
  bool lower_is_better_;
  std::size_t seen_ = 0;
  std::size_t since_best_ = 0;
  std::size_t best_index_ = 0;
  double best_ = 0.0;
};

// A trained corruption model together with the vocabulary it was built on.
struct Corruptor {
  Vocabulary vocab;
  Seq2SeqParams params;

  EncodedPair encode_pair(const ParallelPair& pair) const;
  std::vector<EncodedPair> encode_pairs(const std::vector<ParallelPair>& pairs) const;
};

// "WSM1", u64 vocab/emb/cell, every tensor row-major as f64 in visit order,
// then u64 token count and length-prefixed non-reserved tokens.
void save_corruptor(const Corruptor& model, const std::filesystem::path& path);
Corruptor load_corruptor(const std::filesystem::path& path);
std::string serialize_corruptor(const Corruptor& model);
Corruptor deserialize_corruptor(std::string bytes);

}  // namespace wrongsmith
