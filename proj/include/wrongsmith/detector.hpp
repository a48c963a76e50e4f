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

struct DetectorDims {
  std::size_t vocab = 0;
  std::size_t emb = 0;
  std::size_t cell = 0;

  friend bool operator==(const DetectorDims&, const DetectorDims&) = default;
};

// Bidirectional LSTM tagger; the output layer reads [forward; backward]
// and scores the classes {c, i} (row 0 and row 1).
struct DetectorParams {
  Matrix embedding;       // V x E
  LstmWeights forward;    // input E
  LstmWeights backward;   // input E
  Matrix output_weights;  // 2 x 2H
  Vector output_bias;     // 2

  static DetectorParams zeros(const DetectorDims& dims);
  DetectorDims dims() const { return {embedding.rows, embedding.cols, forward.hidden()}; }

  template <class Self, class F>
  static void visit(Self& self, F&& f) {
    f("embedding", self.embedding.data);
    LstmWeights::visit(self.forward, "forward", f);
    LstmWeights::visit(self.backward, "backward", f);
    f("output_weights", self.output_weights.data);
    f("output_bias", self.output_bias);
  }

  friend bool operator==(const DetectorParams&, const DetectorParams&) = default;
};

DetectorParams init_detector(std::uint64_t seed, const DetectorDims& dims);

// Per-token probability of 'i'. Throws EmptyInput for an empty sentence.
Vector detector_forward(const DetectorParams& params, std::span<const TokenId> tokens);
// Per-token [p(c), p(i)].
std::vector<Vector> detector_class_probs(const DetectorParams& params, std::span<const TokenId> tokens);

struct EncodedLabeled {
  std::vector<TokenId> tokens;
  std::vector<Label> labels;
};

// Mean token cross-entropy.
double detector_loss(const DetectorParams& params, const EncodedLabeled& example);

struct DetectorLossGradient {
  double loss = 0.0;
  DetectorParams gradient;
};

DetectorLossGradient detector_example_gradient(const DetectorParams& params, const EncodedLabeled& example);
// Mean over the batch; OpenMP and serial reference agree bit for bit.
DetectorLossGradient detector_grad(const DetectorParams& params, std::span<const EncodedLabeled> batch);
DetectorLossGradient detector_grad_serial(const DetectorParams& params, std::span<const EncodedLabeled> batch);

struct Detector {
  Vocabulary vocab;
  DetectorParams params;

  EncodedLabeled encode(const LabeledSentence& sentence) const;
  std::vector<EncodedLabeled> encode_all(const std::vector<LabeledSentence>& data) const;
};

// 'i' wherever p(i) >= threshold.
LabeledSentence predict_labels(const Detector& detector, const std::vector<std::string>& tokens, double threshold);
std::vector<LabeledSentence> predict_all(const Detector& detector, const std::vector<LabeledSentence>& data,
                                         double threshold);

enum class Alternation { kNone, kEpoch };

struct DetectorTrainConfig {
  std::size_t cell_size = 32;
  std::size_t emb_size = 32;
  double learning_rate = 0.5;
  std::size_t batch_size = 8;
  std::size_t patience = 20;
  std::size_t max_epochs = 60;
  double clip_norm = 5.0;
  std::uint64_t seed = 1;
  std::size_t min_count = 1;
  Alternation alternation = Alternation::kEpoch;
  bool end_on_real = true;
  double threshold = 0.5;
  double beta = 0.5;

  void validate() const;
};

enum class EpochSource { kReal, kSynthetic };

struct DetectorEpochRecord {
  std::size_t epoch = 0;
  EpochSource source = EpochSource::kReal;
  double train_loss = 0.0;
  double dev_f05 = 0.0;
  bool improved = false;

  friend bool operator==(const DetectorEpochRecord&, const DetectorEpochRecord&) = default;
};

// {"epoch":n,"source":"real|synthetic","dev_f05":x}
std::string history_json_line(const DetectorEpochRecord& record);

struct DetectorTrainResult {
  Detector best;
  std::size_t best_epoch = 0;
  std::vector<DetectorEpochRecord> history;
};

// Which data set each epoch (1-based) trains on.
EpochSource epoch_source(const DetectorTrainConfig& config, bool has_synthetic, std::size_t epoch);

// Trains on `real`, optionally alternating epoch by epoch with `synthetic`.
// Synthetic epochs consume |real|-sized shards of the (once shuffled)
// synthetic set round-robin. With end_on_real the schedule opens on
// synthetic so that every second epoch, and the last, is real; only real
// epochs are eligible for early stopping and model selection. Alternation
// kNone with synthetic data trains on the union each epoch.
// Throws EmptyInput when real or dev is empty.
DetectorTrainResult train_detector(const std::vector<LabeledSentence>& real,
                                   const std::vector<LabeledSentence>& synthetic,
                                   const std::vector<LabeledSentence>& dev, const DetectorTrainConfig& config,
                                   const std::function<void(const DetectorEpochRecord&)>& on_epoch = {});

// "WSD1", u64 vocab/emb/cell, tensors as f64 in visit order, then the vocabulary.
void save_detector(const Detector& detector, const std::filesystem::path& path);
Detector load_detector(const std::filesystem::path& path);

}  // namespace wrongsmith
