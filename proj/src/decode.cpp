#include "wrongsmith/decode.hpp"

#include <cmath>
#include <limits>

namespace wrongsmith {

void DecodeConfig::validate() const {
  if (!(tau > 0.0)) throw ConfigError("temperature must be > 0");
  if (beam_width < 1) throw ConfigError("beam width must be >= 1");
  if (max_len && *max_len < 1) throw ConfigError("max_len must be >= 1");
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kArgmax: return "am";
    case Strategy::kTemperature: return "ts";
    case Strategy::kBeam: return "bs";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "am") return Strategy::kArgmax;
  if (name == "ts") return Strategy::kTemperature;
  if (name == "bs") return Strategy::kBeam;
  throw ConfigError("unknown strategy '" + std::string(name) + "' (expected am, ts or bs)");
}

namespace {

// log p~ = log p / tau - logsumexp(log p / tau)
Vector tempered_log_probs(std::span<const double> log_probs, double tau) {
  if (!(tau > 0.0)) throw ConfigError("temperature must be > 0");
  Vector scaled(log_probs.size());
  for (std::size_t i = 0; i < log_probs.size(); ++i) scaled[i] = log_probs[i] / tau;
  const double lse = log_sum_exp(scaled);
  for (double& v : scaled) v -= lse;
  return scaled;
}

}  // namespace

Vector apply_temperature_log(std::span<const double> log_probs, double tau) {
  Vector out = tempered_log_probs(log_probs, tau);
  for (double& v : out) v = std::exp(v);
  return out;
}

Distribution apply_temperature(const Distribution& p, double tau) {
  Vector logs(p.probs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = std::log(p.probs[i]);
  Distribution out;
  out.log_probs = tempered_log_probs(logs, tau);
  out.probs.resize(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) out.probs[i] = std::exp(out.log_probs[i]);
  return out;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::size_t sample_index(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // Rounding left the total just under u.
  return last_positive;
}

std::pair<Vector, LstmState> Seq2SeqStepModel::step(const State& state, TokenId prev) const {
  const AttentionResult att = attend(*params_, state.h, encoded_);
  DecoderStepResult r = decoder_step(*params_, state, prev, att.summary);
  return {std::move(r.distribution.log_probs), std::move(r.state)};
}

Sentence realize(const Corruptor& model, const Sentence& source, std::span<const TokenId> source_ids,
                 std::span<const TokenId> output_ids) {
  std::span<const TokenId> body = output_ids;
  if (!body.empty() && body.back() == Vocabulary::kEos) body = body.first(body.size() - 1);
  Sentence out;
  const bool has_unk = std::find(body.begin(), body.end(), Vocabulary::kUnk) != body.end();
  std::vector<Vector> attention;
  if (has_unk) attention = attention_trace(model.params, source_ids, output_ids);
  for (std::size_t t = 0; t < body.size(); ++t) {
    if (body[t] == Vocabulary::kUnk) {
      out.tokens.push_back(source.tokens[argmax(attention[t])]);
    } else {
      out.tokens.push_back(model.vocab.token(body[t]));
    }
  }
  return out;
}

namespace {

Corruption finish(const Corruptor& model, const Sentence& source, std::span<const TokenId> source_ids,
                  Decoded decoded) {
  Corruption c;
  c.sentence = realize(model, source, source_ids, decoded.ids);
  c.log_prob = decoded.log_prob;
  c.ids = std::move(decoded.ids);
  return c;
}

std::vector<TokenId> encode_source(const Corruptor& model, const Sentence& source) {
  if (source.empty()) throw EmptyInput("source sentence");
  return model.vocab.encode(source);
}

}  // namespace

Corruption greedy_decode(const Corruptor& model, const Sentence& source, const DecodeConfig& config) {
  config.validate();
  const auto ids = encode_source(model, source);
  const Seq2SeqStepModel step_model(model.params, ids);
  return finish(model, source, ids, greedy_search(step_model, config.max_len_for(source.size())));
}

Corruption temperature_decode(const Corruptor& model, const Sentence& source, const DecodeConfig& config) {
  config.validate();
  const auto ids = encode_source(model, source);
  const Seq2SeqStepModel step_model(model.params, ids);
  Rng rng(config.seed);
  return finish(model, source, ids, sample_search(step_model, config.tau, config.max_len_for(source.size()), rng));
}

std::vector<Corruption> beam_decode(const Corruptor& model, const Sentence& source, const DecodeConfig& config) {
  config.validate();
  const auto ids = encode_source(model, source);
  const Seq2SeqStepModel step_model(model.params, ids);
  std::vector<Corruption> out;
  for (Decoded& d : beam_search(step_model, config.beam_width, config.max_len_for(source.size()))) {
    out.push_back(finish(model, source, ids, std::move(d)));
  }
  return out;
}

}  // namespace wrongsmith
