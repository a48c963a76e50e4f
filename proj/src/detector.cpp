#include "wrongsmith/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "wrongsmith/binary_io.hpp"
#include "wrongsmith/error.hpp"
#include "wrongsmith/eval.hpp"
#include "wrongsmith/parallel.hpp"
#include "wrongsmith/params.hpp"
#include "wrongsmith/random.hpp"

namespace wrongsmith {
namespace {

constexpr double kInitScale = 0.08;
constexpr std::size_t kClassIncorrect = 1;

std::size_t class_of(Label l) { return l == Label::kIncorrect ? 1 : 0; }

struct Trace {
  std::vector<LstmStep> forward;
  std::vector<LstmStep> backward;  // indexed by token position
  std::vector<Vector> features;    // [fw_h; bw_h]
  std::vector<Vector> log_probs;
};

Trace run(const DetectorParams& p, std::span<const TokenId> tokens) {
  if (tokens.empty()) throw EmptyInput("detector input sentence");
  const std::size_t n = tokens.size();
  const std::size_t cell = p.forward.hidden();
  for (TokenId t : tokens) {
    if (t >= p.embedding.rows) throw ConfigError("token id outside detector vocabulary");
  }
  Trace trace;
  LstmState state = LstmState::zeros(cell);
  for (std::size_t t = 0; t < n; ++t) {
    trace.forward.push_back(lstm_forward(p.forward, p.embedding.row(tokens[t]), state));
    state = trace.forward.back().next;
  }
  trace.backward.resize(n);
  state = LstmState::zeros(cell);
  for (std::size_t t = n; t-- > 0;) {
    trace.backward[t] = lstm_forward(p.backward, p.embedding.row(tokens[t]), state);
    state = trace.backward[t].next;
  }
  for (std::size_t t = 0; t < n; ++t) {
    Vector z = trace.forward[t].next.h;
    z.insert(z.end(), trace.backward[t].next.h.begin(), trace.backward[t].next.h.end());
    Vector logits = p.output_bias;
    gemv_acc(p.output_weights, z, logits);
    trace.features.push_back(std::move(z));
    trace.log_probs.push_back(log_softmax(logits));
  }
  return trace;
}

}  // namespace

DetectorParams DetectorParams::zeros(const DetectorDims& d) {
  if (d.vocab == 0 || d.emb == 0 || d.cell == 0) throw ConfigError("detector dimensions must be non-zero");
  DetectorParams p;
  p.embedding = Matrix(d.vocab, d.emb);
  p.forward = LstmWeights(d.emb, d.cell);
  p.backward = LstmWeights(d.emb, d.cell);
  p.output_weights = Matrix(2, 2 * d.cell);
  p.output_bias = Vector(2, 0.0);
  return p;
}

DetectorParams init_detector(std::uint64_t seed, const DetectorDims& dims) {
  DetectorParams p = DetectorParams::zeros(dims);
  Rng rng(seed);
  for (auto v : params::views(p)) fill_uniform(v, rng, -kInitScale, kInitScale);
  return p;
}

std::vector<Vector> detector_class_probs(const DetectorParams& params, std::span<const TokenId> tokens) {
  const Trace trace = run(params, tokens);
  std::vector<Vector> out;
  for (const Vector& lp : trace.log_probs) out.push_back({std::exp(lp[0]), std::exp(lp[1])});
  return out;
}

Vector detector_forward(const DetectorParams& params, std::span<const TokenId> tokens) {
  const Trace trace = run(params, tokens);
  Vector out;
  for (const Vector& lp : trace.log_probs) out.push_back(std::exp(lp[kClassIncorrect]));
  return out;
}

double detector_loss(const DetectorParams& params, const EncodedLabeled& example) {
  const Trace trace = run(params, example.tokens);
  double total = 0.0;
  for (std::size_t t = 0; t < example.tokens.size(); ++t) total -= trace.log_probs[t][class_of(example.labels[t])];
  return total / static_cast<double>(example.tokens.size());
}

DetectorLossGradient detector_example_gradient(const DetectorParams& p, const EncodedLabeled& example) {
  if (example.labels.size() != example.tokens.size()) throw ShapeError(0, "labels and tokens differ in length");
  const Trace trace = run(p, example.tokens);
  const DetectorDims dims = p.dims();
  const std::size_t n = example.tokens.size();
  const std::size_t cell = dims.cell;
  const double norm = 1.0 / static_cast<double>(n);

  DetectorLossGradient result;
  result.gradient = DetectorParams::zeros(dims);
  DetectorParams& g = result.gradient;

  std::vector<Vector> d_fw(n, Vector(cell, 0.0));
  std::vector<Vector> d_bw(n, Vector(cell, 0.0));
  Vector dlogits(2);
  Vector dz(2 * cell);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t gold = class_of(example.labels[t]);
    result.loss -= trace.log_probs[t][gold];
    for (std::size_t k = 0; k < 2; ++k) dlogits[k] = std::exp(trace.log_probs[t][k]) * norm;
    dlogits[gold] -= norm;
    outer_acc(g.output_weights, dlogits, trace.features[t]);
    axpy(1.0, dlogits, g.output_bias);
    std::fill(dz.begin(), dz.end(), 0.0);
    gemv_t_acc(p.output_weights, dlogits, dz);
    std::copy(dz.begin(), dz.begin() + static_cast<std::ptrdiff_t>(cell), d_fw[t].begin());
    std::copy(dz.begin() + static_cast<std::ptrdiff_t>(cell), dz.end(), d_bw[t].begin());
  }
  result.loss *= norm;

  Vector dx(dims.emb);
  LstmState carry = LstmState::zeros(cell);
  LstmState dprev;
  for (std::size_t t = n; t-- > 0;) {
    Vector dh = carry.h;
    axpy(1.0, d_fw[t], dh);
    std::fill(dx.begin(), dx.end(), 0.0);
    lstm_backward(p.forward, trace.forward[t], dh, carry.c, g.forward, dx, dprev);
    axpy(1.0, dx, g.embedding.row(example.tokens[t]));
    carry = dprev;
  }
  carry = LstmState::zeros(cell);
  for (std::size_t t = 0; t < n; ++t) {
    Vector dh = carry.h;
    axpy(1.0, d_bw[t], dh);
    std::fill(dx.begin(), dx.end(), 0.0);
    lstm_backward(p.backward, trace.backward[t], dh, carry.c, g.backward, dx, dprev);
    axpy(1.0, dx, g.embedding.row(example.tokens[t]));
    carry = dprev;
  }
  return result;
}

namespace {

DetectorLossGradient reduce(const DetectorParams& params, std::vector<DetectorLossGradient>& parts) {
  DetectorLossGradient total;
  total.gradient = params::zeros_like(params);
  if (parts.empty()) return total;
  const double inv = 1.0 / static_cast<double>(parts.size());
  for (DetectorLossGradient& part : parts) {
    total.loss += part.loss;
    params::add_scaled(total.gradient, part.gradient, 1.0);
  }
  total.loss *= inv;
  params::scale(total.gradient, inv);
  return total;
}

}  // namespace

DetectorLossGradient detector_grad(const DetectorParams& params, std::span<const EncodedLabeled> batch) {
  auto parts = parallel::map(batch.size(), [&](std::size_t i) { return detector_example_gradient(params, batch[i]); });
  return reduce(params, parts);
}

DetectorLossGradient detector_grad_serial(const DetectorParams& params, std::span<const EncodedLabeled> batch) {
  auto parts =
      parallel::map_serial(batch.size(), [&](std::size_t i) { return detector_example_gradient(params, batch[i]); });
  return reduce(params, parts);
}

EncodedLabeled Detector::encode(const LabeledSentence& sentence) const {
  return {vocab.encode(Sentence{sentence.tokens}), sentence.labels};
}

std::vector<EncodedLabeled> Detector::encode_all(const std::vector<LabeledSentence>& data) const {
  std::vector<EncodedLabeled> out;
  out.reserve(data.size());
  for (const LabeledSentence& s : data) out.push_back(encode(s));
  return out;
}

LabeledSentence predict_labels(const Detector& detector, const std::vector<std::string>& tokens, double threshold) {
  const Vector p = detector_forward(detector.params, detector.vocab.encode(Sentence{tokens}));
  LabeledSentence out;
  out.tokens = tokens;
  for (double pi : p) out.labels.push_back(pi >= threshold ? Label::kIncorrect : Label::kCorrect);
  return out;
}

std::vector<LabeledSentence> predict_all(const Detector& detector, const std::vector<LabeledSentence>& data,
                                         double threshold) {
  return parallel::map(data.size(), [&](std::size_t i) { return predict_labels(detector, data[i].tokens, threshold); });
}

void DetectorTrainConfig::validate() const {
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (cell_size == 0 || emb_size == 0 || batch_size == 0) throw ConfigError("sizes must be > 0");
  if (max_epochs == 0) throw ConfigError("max_epochs must be > 0");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
}

std::string history_json_line(const DetectorEpochRecord& record) {
  nlohmann::ordered_json j;
  j["epoch"] = record.epoch;
  j["source"] = record.source == EpochSource::kReal ? "real" : "synthetic";
  j["dev_f05"] = record.dev_f05;
  return j.dump();
}

EpochSource epoch_source(const DetectorTrainConfig& config, bool has_synthetic, std::size_t epoch) {
  if (!has_synthetic || config.alternation == Alternation::kNone) return EpochSource::kReal;
  const bool odd = epoch % 2 == 1;
  if (config.end_on_real) return odd ? EpochSource::kSynthetic : EpochSource::kReal;
  return odd ? EpochSource::kReal : EpochSource::kSynthetic;
}

DetectorTrainResult train_detector(const std::vector<LabeledSentence>& real,
                                   const std::vector<LabeledSentence>& synthetic,
                                   const std::vector<LabeledSentence>& dev, const DetectorTrainConfig& config,
                                   const std::function<void(const DetectorEpochRecord&)>& on_epoch) {
  config.validate();
  if (real.empty()) throw EmptyInput("real training data");
  if (dev.empty()) throw EmptyInput("detector dev data");

  std::vector<Sentence> vocab_corpus;
  for (const auto& s : real) vocab_corpus.push_back({s.tokens});
  for (const auto& s : synthetic) vocab_corpus.push_back({s.tokens});

  Detector detector;
  detector.vocab = Vocabulary::build(vocab_corpus, config.min_count);
  detector.params = init_detector(config.seed, {detector.vocab.size(), config.emb_size, config.cell_size});

  const std::vector<EncodedLabeled> real_set = detector.encode_all(real);
  std::vector<EncodedLabeled> synthetic_set = detector.encode_all(synthetic);
  const bool has_synthetic = !synthetic_set.empty();
  const bool mixed = has_synthetic && config.alternation == Alternation::kNone;

  Rng rng(mix_seed(config.seed, 0xde7ec7ULL));
  rng.shuffle(std::span<EncodedLabeled>(synthetic_set));
  const std::size_t shard_size = std::min(real_set.size(), synthetic_set.size());
  std::size_t shard_cursor = 0;

  // With end_on_real only real epochs can stop training, so the last epoch
  // run is real even when max_epochs is odd.
  const bool select_on_real_only = has_synthetic && !mixed && config.end_on_real;
  std::size_t last_epoch = config.max_epochs;
  if (select_on_real_only && last_epoch % 2 == 1) --last_epoch;
  if (last_epoch == 0) throw ConfigError("alternating training that ends on real data needs max_epochs >= 2");

  DetectorTrainResult result;
  result.best = detector;
  std::size_t since_best = 0;
  double best_f = -1.0;
  std::vector<EncodedLabeled> epoch_data;
  std::vector<std::size_t> order;
  for (std::size_t epoch = 1; epoch <= last_epoch; ++epoch) {
    const EpochSource source = epoch_source(config, has_synthetic, epoch);
    epoch_data.clear();
    if (source == EpochSource::kReal) {
      epoch_data = real_set;
      if (mixed) epoch_data.insert(epoch_data.end(), synthetic_set.begin(), synthetic_set.end());
    } else {
      for (std::size_t k = 0; k < shard_size; ++k) {
        epoch_data.push_back(synthetic_set[shard_cursor]);
        shard_cursor = (shard_cursor + 1) % synthetic_set.size();
      }
    }
    order.resize(epoch_data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));

    double train_loss = 0.0;
    std::vector<EncodedLabeled> batch;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(epoch_data[order[k]]);
      const DetectorLossGradient lg = detector_grad(detector.params, batch);
      train_loss += lg.loss * static_cast<double>(batch.size());
      params::sgd_step(detector.params, lg.gradient, config.learning_rate, config.clip_norm);
      if (!params::finite(detector.params)) throw InvariantError("detector parameters became non-finite");
    }

    DetectorEpochRecord record;
    record.epoch = epoch;
    record.source = source;
    record.train_loss = train_loss / static_cast<double>(order.size());
    record.dev_f05 = prf(predict_all(detector, dev, config.threshold), dev, config.beta).f;

    const bool eligible = !select_on_real_only || source == EpochSource::kReal;
    if (eligible) {
      if (record.dev_f05 > best_f) {
        best_f = record.dev_f05;
        since_best = 0;
        record.improved = true;
        result.best = detector;
        result.best_epoch = epoch;
      } else {
        ++since_best;
      }
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
    if (eligible && since_best >= config.patience) break;
  }
  return result;
}

namespace {

Detector read_detector(BinaryReader& in) {
  in.expect_magic("WSD1");
  DetectorDims dims;
  dims.vocab = in.u64();
  dims.emb = in.u64();
  dims.cell = in.u64();
  if (dims.vocab < Vocabulary::kNumReserved || dims.vocab > (1u << 24) || dims.emb > (1u << 16) ||
      dims.cell > (1u << 16)) {
    throw ConfigError("implausible detector dimensions");
  }
  Detector d;
  d.params = DetectorParams::zeros(dims);
  DetectorParams::visit(d.params, [&](const std::string&, Vector& v) { in.vector(v, v.size()); });
  const std::uint64_t n = in.u64();
  if (n + Vocabulary::kNumReserved != dims.vocab) throw ConfigError("vocabulary size does not match dims header");
  std::vector<std::string> tokens;
  for (std::uint64_t i = 0; i < n; ++i) tokens.push_back(in.string());
  in.expect_end();
  d.vocab = Vocabulary::from_tokens(tokens);
  return d;
}

}  // namespace

void save_detector(const Detector& detector, const std::filesystem::path& path) {
  const DetectorDims dims = detector.params.dims();
  if (dims.vocab != detector.vocab.size()) throw ConfigError("vocabulary size does not match detector");
  BinaryWriter out;
  out.magic("WSD1");
  out.u64(dims.vocab);
  out.u64(dims.emb);
  out.u64(dims.cell);
  for (auto v : params::views(detector.params)) out.vector(Vector(v.begin(), v.end()));
  const auto tokens = detector.vocab.tokens();
  out.u64(tokens.size());
  for (const std::string& t : tokens) out.string(t);
  out.save(path);
}

Detector load_detector(const std::filesystem::path& path) {
  BinaryReader in = BinaryReader::open(path);
  return read_detector(in);
}

}  // namespace wrongsmith
