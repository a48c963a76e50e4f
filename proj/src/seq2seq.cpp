#include "wrongsmith/seq2seq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wrongsmith/binary_io.hpp"
#include "wrongsmith/error.hpp"
#include "wrongsmith/parallel.hpp"
#include "wrongsmith/params.hpp"
#include "wrongsmith/random.hpp"

namespace wrongsmith {
namespace {

constexpr double kInitScale = 0.08;

void check_token(TokenId id, std::size_t vocab) {
  if (id >= vocab) throw ConfigError("token id " + std::to_string(id) + " outside vocabulary of " + std::to_string(vocab));
}

struct AttentionCache {
  Vector query;            // W_s h
  std::vector<Vector> hidden;  // tanh(query + key_j)
  AttentionResult result;
};

AttentionCache attend_cached(const Seq2SeqParams& p, std::span<const double> h, const EncoderOutput& enc) {
  const std::size_t cell = p.attention_state.rows;
  if (h.size() != cell) throw ConfigError("decoder state size does not match attention");
  if (enc.contexts.empty()) throw ConfigError("attention over empty contexts");
  AttentionCache cache;
  cache.query.assign(cell, 0.0);
  gemv_acc(p.attention_state, h, cache.query);

  const std::size_t n = enc.contexts.size();
  Vector scores(n);
  cache.hidden.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector& u = cache.hidden[j];
    u.resize(cell);
    for (std::size_t k = 0; k < cell; ++k) u[k] = std::tanh(cache.query[k] + enc.keys[j][k]);
    scores[j] = dot(p.attention_vector, u);
  }
  cache.result.weights = softmax(scores);
  cache.result.summary.assign(cell, 0.0);
  for (std::size_t j = 0; j < n; ++j) axpy(cache.result.weights[j], enc.contexts[j], cache.result.summary);
  return cache;
}

void attend_backward(const Seq2SeqParams& p, std::span<const double> h, const EncoderOutput& enc,
                     const AttentionCache& cache, std::span<const double> d_summary, Seq2SeqParams& g,
                     std::span<double> dh, std::vector<Vector>& d_contexts) {
  const std::size_t n = enc.contexts.size();
  const std::size_t cell = h.size();
  const Vector& a = cache.result.weights;

  Vector da(n);
  for (std::size_t j = 0; j < n; ++j) {
    da[j] = dot(d_summary, enc.contexts[j]);
    axpy(a[j], d_summary, d_contexts[j]);
  }
  double mean = 0.0;
  for (std::size_t j = 0; j < n; ++j) mean += a[j] * da[j];

  Vector dq(cell, 0.0);
  Vector dpre(cell);
  for (std::size_t j = 0; j < n; ++j) {
    const double ds = a[j] * (da[j] - mean);
    const Vector& u = cache.hidden[j];
    axpy(ds, u, g.attention_vector);
    for (std::size_t k = 0; k < cell; ++k) dpre[k] = ds * p.attention_vector[k] * (1.0 - u[k] * u[k]);
    axpy(1.0, dpre, dq);
    outer_acc(g.attention_context, dpre, enc.contexts[j]);
    gemv_t_acc(p.attention_context, dpre, d_contexts[j]);
  }
  outer_acc(g.attention_state, dq, h);
  gemv_t_acc(p.attention_state, dq, dh);
}

Vector decoder_input(const Seq2SeqParams& p, TokenId prev, std::span<const double> summary) {
  const auto emb = p.target_embedding.row(prev);
  Vector x(emb.begin(), emb.end());
  x.insert(x.end(), summary.begin(), summary.end());
  return x;
}

Vector output_logits(const Seq2SeqParams& p, std::span<const double> h) {
  Vector logits = p.output_bias;
  gemv_acc(p.output_weights, h, logits);
  return logits;
}

struct EncoderTrace {
  std::vector<LstmStep> steps;
  EncoderOutput output;
};

EncoderTrace encode_traced(const Seq2SeqParams& p, std::span<const TokenId> source) {
  if (source.empty()) throw EmptyInput("source sentence");
  const std::size_t vocab = p.source_embedding.rows;
  const std::size_t cell = p.encoder.hidden();
  EncoderTrace trace;
  LstmState state = LstmState::zeros(cell);
  for (TokenId id : source) {
    check_token(id, vocab);
    trace.steps.push_back(lstm_forward(p.encoder, p.source_embedding.row(id), state));
    state = trace.steps.back().next;
    trace.output.contexts.push_back(state.h);
    Vector key(cell, 0.0);
    gemv_acc(p.attention_context, state.h, key);
    trace.output.keys.push_back(std::move(key));
  }
  trace.output.final_state = state;
  return trace;
}

struct DecoderTrace {
  std::vector<TokenId> inputs;
  std::vector<TokenId> targets;
  std::vector<AttentionCache> attention;
  std::vector<LstmStep> steps;
  std::vector<Vector> log_probs;
};

// Teacher-forced pass feeding BOS + output[:-1] and predicting output.
DecoderTrace decode_traced(const Seq2SeqParams& p, const EncoderOutput& enc, std::span<const TokenId> output) {
  const std::size_t vocab = p.output_weights.rows;
  DecoderTrace trace;
  LstmState state = enc.final_state;
  TokenId prev = Vocabulary::kBos;
  for (TokenId target : output) {
    check_token(target, vocab);
    trace.inputs.push_back(prev);
    trace.targets.push_back(target);
    trace.attention.push_back(attend_cached(p, state.h, enc));
    const Vector x = decoder_input(p, prev, trace.attention.back().result.summary);
    trace.steps.push_back(lstm_forward(p.decoder, x, state));
    state = trace.steps.back().next;
    trace.log_probs.push_back(log_softmax(output_logits(p, state.h)));
    prev = target;
  }
  return trace;
}

std::vector<TokenId> with_eos(const std::vector<TokenId>& target) {
  std::vector<TokenId> out = target;
  out.push_back(Vocabulary::kEos);
  return out;
}

}  // namespace

Seq2SeqParams Seq2SeqParams::zeros(const Seq2SeqDims& d) {
  if (d.vocab == 0 || d.emb == 0 || d.cell == 0) throw ConfigError("seq2seq dimensions must be non-zero");
  Seq2SeqParams p;
  p.source_embedding = Matrix(d.vocab, d.emb);
  p.target_embedding = Matrix(d.vocab, d.emb);
  p.encoder = LstmWeights(d.emb, d.cell);
  p.decoder = LstmWeights(d.emb + d.cell, d.cell);
  p.attention_state = Matrix(d.cell, d.cell);
  p.attention_context = Matrix(d.cell, d.cell);
  p.attention_vector = Vector(d.cell, 0.0);
  p.output_weights = Matrix(d.vocab, d.cell);
  p.output_bias = Vector(d.vocab, 0.0);
  return p;
}

Seq2SeqParams init_seq2seq(std::uint64_t seed, const Seq2SeqDims& dims) {
  Seq2SeqParams p = Seq2SeqParams::zeros(dims);
  Rng rng(seed);
  for (auto v : params::views(p)) fill_uniform(v, rng, -kInitScale, kInitScale);
  return p;
}

Distribution Distribution::from_logits(std::span<const double> logits) {
  Distribution d;
  d.log_probs = log_softmax(logits);
  d.probs.resize(d.log_probs.size());
  for (std::size_t i = 0; i < d.probs.size(); ++i) d.probs[i] = std::exp(d.log_probs[i]);
  return d;
}

Distribution Distribution::from_probs(std::span<const double> probs) {
  Distribution d;
  d.probs.assign(probs.begin(), probs.end());
  d.log_probs.resize(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) d.log_probs[i] = std::log(probs[i]);
  return d;
}

EncoderOutput encode(const Seq2SeqParams& params, std::span<const TokenId> source) {
  return encode_traced(params, source).output;
}

AttentionResult attend(const Seq2SeqParams& params, std::span<const double> decoder_h, const EncoderOutput& encoded) {
  return attend_cached(params, decoder_h, encoded).result;
}

AttentionResult attend(const Seq2SeqParams& params, std::span<const double> decoder_h,
                       const std::vector<Vector>& contexts) {
  EncoderOutput enc;
  enc.contexts = contexts;
  for (const Vector& c : contexts) {
    if (c.size() != params.attention_context.cols) throw ConfigError("context size does not match attention");
    Vector key(params.attention_context.rows, 0.0);
    gemv_acc(params.attention_context, c, key);
    enc.keys.push_back(std::move(key));
  }
  return attend_cached(params, decoder_h, enc).result;
}

DecoderStepResult decoder_step(const Seq2SeqParams& params, const LstmState& state, TokenId prev_token,
                               std::span<const double> summary) {
  check_token(prev_token, params.target_embedding.rows);
  if (summary.size() != params.decoder.hidden()) throw ConfigError("attention summary has wrong size");
  const Vector x = decoder_input(params, prev_token, summary);
  LstmStep step = lstm_forward(params.decoder, x, state);
  return {Distribution::from_logits(output_logits(params, step.next.h)), std::move(step.next)};
}

double loss(const Seq2SeqParams& params, const EncodedPair& pair) {
  const std::vector<TokenId> output = with_eos(pair.target);
  return -sequence_log_prob(params, pair.source, output) / static_cast<double>(output.size());
}

double sequence_log_prob(const Seq2SeqParams& params, std::span<const TokenId> source,
                         std::span<const TokenId> output) {
  const EncoderTrace enc = encode_traced(params, source);
  const DecoderTrace dec = decode_traced(params, enc.output, output);
  double total = 0.0;
  for (std::size_t t = 0; t < output.size(); ++t) total += dec.log_probs[t][output[t]];
  return total;
}

std::vector<Vector> attention_trace(const Seq2SeqParams& params, std::span<const TokenId> source,
                                    std::span<const TokenId> output) {
  const EncoderTrace enc = encode_traced(params, source);
  const DecoderTrace dec = decode_traced(params, enc.output, output);
  std::vector<Vector> weights;
  for (const AttentionCache& a : dec.attention) weights.push_back(a.result.weights);
  return weights;
}

LossGradient pair_gradient(const Seq2SeqParams& p, const EncodedPair& pair) {
  const Seq2SeqDims dims = p.dims();
  const std::size_t emb = dims.emb;
  const std::size_t cell = dims.cell;
  const std::vector<TokenId> output = with_eos(pair.target);
  const double norm = 1.0 / static_cast<double>(output.size());

  const EncoderTrace enc = encode_traced(p, pair.source);
  const DecoderTrace dec = decode_traced(p, enc.output, output);

  LossGradient result;
  result.gradient = Seq2SeqParams::zeros(dims);
  Seq2SeqParams& g = result.gradient;
  for (std::size_t t = 0; t < output.size(); ++t) result.loss -= dec.log_probs[t][output[t]];
  result.loss *= norm;

  std::vector<Vector> d_contexts(pair.source.size(), Vector(cell, 0.0));
  LstmState carry = LstmState::zeros(cell);
  Vector dlogits(dims.vocab);
  Vector dx(emb + cell);
  LstmState dprev;
  for (std::size_t t = output.size(); t-- > 0;) {
    const LstmStep& step = dec.steps[t];
    for (std::size_t v = 0; v < dims.vocab; ++v) dlogits[v] = std::exp(dec.log_probs[t][v]) * norm;
    dlogits[output[t]] -= norm;

    outer_acc(g.output_weights, dlogits, step.next.h);
    axpy(1.0, dlogits, g.output_bias);
    Vector dh = carry.h;
    gemv_t_acc(p.output_weights, dlogits, dh);

    std::fill(dx.begin(), dx.end(), 0.0);
    lstm_backward(p.decoder, step, dh, carry.c, g.decoder, dx, dprev);
    axpy(1.0, std::span<const double>(dx).first(emb), g.target_embedding.row(dec.inputs[t]));

    const std::span<const double> d_summary = std::span<const double>(dx).subspan(emb);
    attend_backward(p, step.prev.h, enc.output, dec.attention[t], d_summary, g, dprev.h, d_contexts);
    carry = dprev;
  }

  Vector dx_enc(emb);
  for (std::size_t j = pair.source.size(); j-- > 0;) {
    Vector dh = carry.h;
    axpy(1.0, d_contexts[j], dh);
    // d_contexts already holds the path through the attention keys.
    std::fill(dx_enc.begin(), dx_enc.end(), 0.0);
    lstm_backward(p.encoder, enc.steps[j], dh, carry.c, g.encoder, dx_enc, dprev);
    axpy(1.0, dx_enc, g.source_embedding.row(pair.source[j]));
    carry = dprev;
  }
  return result;
}

namespace {

LossGradient reduce_gradients(const Seq2SeqParams& params, std::vector<LossGradient>& parts) {
  LossGradient total;
  total.gradient = params::zeros_like(params);
  if (parts.empty()) return total;
  const double inv = 1.0 / static_cast<double>(parts.size());
  for (LossGradient& part : parts) {
    total.loss += part.loss;
    params::add_scaled(total.gradient, part.gradient, 1.0);
  }
  total.loss *= inv;
  params::scale(total.gradient, inv);
  return total;
}

double reduce_mean(const std::vector<double>& values) {
  if (values.empty()) throw EmptyInput("mean over no pairs");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

LossGradient grad(const Seq2SeqParams& params, std::span<const EncodedPair> batch) {
  auto parts = parallel::map(batch.size(), [&](std::size_t i) { return pair_gradient(params, batch[i]); });
  return reduce_gradients(params, parts);
}

LossGradient grad_serial(const Seq2SeqParams& params, std::span<const EncodedPair> batch) {
  auto parts = parallel::map_serial(batch.size(), [&](std::size_t i) { return pair_gradient(params, batch[i]); });
  return reduce_gradients(params, parts);
}

double mean_loss(const Seq2SeqParams& params, std::span<const EncodedPair> pairs) {
  return reduce_mean(parallel::map(pairs.size(), [&](std::size_t i) { return loss(params, pairs[i]); }));
}

double mean_loss_serial(const Seq2SeqParams& params, std::span<const EncodedPair> pairs) {
  return reduce_mean(parallel::map_serial(pairs.size(), [&](std::size_t i) { return loss(params, pairs[i]); }));
}

void TrainConfig::validate() const {
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (cell_size == 0 || emb_size == 0) throw ConfigError("cell and embedding sizes must be > 0");
  if (batch_size == 0) throw ConfigError("batch size must be > 0");
  if (max_epochs == 0) throw ConfigError("max_epochs must be > 0");
}

bool EarlyStopping::observe(double score) {
  const bool improved = seen_ == 0 || (lower_is_better_ ? score < best_ : score > best_);
  if (improved) {
    best_ = score;
    best_index_ = seen_;
    since_best_ = 0;
  } else {
    ++since_best_;
  }
  ++seen_;
  return improved;
}

TrainResult train(Seq2SeqParams params, std::span<const EncodedPair> train_pairs,
                  std::span<const EncodedPair> dev_pairs, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_pairs.empty()) throw EmptyInput("training pairs");
  if (dev_pairs.empty()) throw EmptyInput("dev pairs");

  Rng shuffler(mix_seed(config.seed, 0x5eedULL));
  std::vector<std::size_t> order(train_pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  result.best = params;
  EarlyStopping stopper(config.patience, /*lower_is_better=*/true);
  std::vector<EncodedPair> batch;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffler.shuffle(std::span<std::size_t>(order));
    double train_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(train_pairs[order[k]]);
      const LossGradient lg = grad(params, batch);
      train_loss += lg.loss * static_cast<double>(batch.size());
      params::sgd_step(params, lg.gradient, config.learning_rate, config.clip_norm);
      if (!params::finite(params)) throw InvariantError("seq2seq parameters became non-finite");
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = train_loss / static_cast<double>(order.size());
    record.dev_loss = mean_loss(params, dev_pairs);
    record.improved = stopper.observe(record.dev_loss);
    if (record.improved) {
      result.best = params;
      result.best_epoch = epoch;
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
    if (stopper.should_stop()) break;
  }
  return result;
}

EncodedPair Corruptor::encode_pair(const ParallelPair& pair) const {
  return {vocab.encode(pair.source), vocab.encode(pair.target)};
}

std::vector<EncodedPair> Corruptor::encode_pairs(const std::vector<ParallelPair>& pairs) const {
  std::vector<EncodedPair> out;
  out.reserve(pairs.size());
  for (const ParallelPair& p : pairs) out.push_back(encode_pair(p));
  return out;
}

std::string serialize_corruptor(const Corruptor& model) {
  const Seq2SeqDims dims = model.params.dims();
  if (dims.vocab != model.vocab.size()) throw ConfigError("vocabulary size does not match model");
  BinaryWriter out;
  out.magic("WSM1");
  out.u64(dims.vocab);
  out.u64(dims.emb);
  out.u64(dims.cell);
  for (auto v : params::views(model.params)) out.vector(Vector(v.begin(), v.end()));
  const auto tokens = model.vocab.tokens();
  out.u64(tokens.size());
  for (const std::string& t : tokens) out.string(t);
  return out.bytes();
}

namespace {

Corruptor read_corruptor(BinaryReader& in) {
  in.expect_magic("WSM1");
  Seq2SeqDims dims;
  dims.vocab = in.u64();
  dims.emb = in.u64();
  dims.cell = in.u64();
  if (dims.vocab < Vocabulary::kNumReserved || dims.vocab > (1u << 24) || dims.emb > (1u << 16) ||
      dims.cell > (1u << 16)) {
    throw ConfigError("implausible model dimensions");
  }
  Corruptor model;
  model.params = Seq2SeqParams::zeros(dims);
  Seq2SeqParams::visit(model.params, [&](const std::string&, Vector& v) { in.vector(v, v.size()); });
  const std::uint64_t n = in.u64();
  if (n + Vocabulary::kNumReserved != dims.vocab) throw ConfigError("vocabulary size does not match dims header");
  std::vector<std::string> tokens;
  for (std::uint64_t i = 0; i < n; ++i) tokens.push_back(in.string());
  in.expect_end();
  model.vocab = Vocabulary::from_tokens(tokens);
  return model;
}

}  // namespace

Corruptor deserialize_corruptor(std::string bytes) {
  BinaryReader in(std::move(bytes));
  return read_corruptor(in);
}

void save_corruptor(const Corruptor& model, const std::filesystem::path& path) {
  write_text_file(path, serialize_corruptor(model));
}

Corruptor load_corruptor(const std::filesystem::path& path) {
  BinaryReader in = BinaryReader::open(path);
  return read_corruptor(in);
}

}  // namespace wrongsmith
