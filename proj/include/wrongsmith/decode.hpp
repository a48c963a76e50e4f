#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "wrongsmith/corpus.hpp"
#include "wrongsmith/error.hpp"
#include "wrongsmith/random.hpp"
#include "wrongsmith/seq2seq.hpp"
#include "wrongsmith/tensor.hpp"

namespace wrongsmith {

enum class Strategy { kArgmax, kTemperature, kBeam };

struct DecodeConfig {
  Strategy strategy = Strategy::kArgmax;
  double tau = 0.05;
  std::size_t beam_width = 11;
  std::optional<std::size_t> max_len;  // default 2 * |source| + 5
  std::uint64_t seed = 1;

  std::size_t max_len_for(std::size_t source_len) const { return max_len.value_or(2 * source_len + 5); }
  // Throws ConfigError on tau <= 0, beam_width < 1 or max_len < 1.
  void validate() const;
};

const char* strategy_name(Strategy s);
// Accepts "am", "ts" and "bs"; throws ConfigError otherwise.
Strategy parse_strategy(std::string_view name);

// p~_i = p_i^(1/tau) / sum_j p_j^(1/tau), evaluated in log space.
Distribution apply_temperature(const Distribution& p, double tau);
Vector apply_temperature_log(std::span<const double> log_probs, double tau);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

// Inverse-CDF draw over ascending indices using one uniform from `rng`.
std::size_t sample_index(std::span<const double> probs, Rng& rng);

// Autoregressive model seen by the search routines: `step` consumes the
// previous token and returns next-token log-probabilities with the new state.
// Decoding starts from Vocabulary::kBos and ends on Vocabulary::kEos.
template <class M>
concept StepModel = requires(const M& m, const typename M::State& s, TokenId t) {
  { m.initial_state() } -> std::convertible_to<typename M::State>;
  { m.step(s, t) } -> std::same_as<std::pair<Vector, typename M::State>>;
  { m.vocab_size() } -> std::convertible_to<std::size_t>;
};

// A finished or truncated output. `ids` ends with kEos when the decoder chose
// to stop; `log_prob` sums the log-probabilities of every id in `ids`.
struct Decoded {
  std::vector<TokenId> ids;
  double log_prob = 0.0;

  bool ended() const { return !ids.empty() && ids.back() == Vocabulary::kEos; }
  friend bool operator==(const Decoded&, const Decoded&) = default;
};

template <StepModel M>
Decoded greedy_search(const M& model, std::size_t max_len) {
  Decoded out;
  auto state = model.initial_state();
  TokenId prev = Vocabulary::kBos;
  while (out.ids.size() < max_len) {
    auto [log_probs, next] = model.step(state, prev);
    const auto best = static_cast<TokenId>(argmax(log_probs));
    out.ids.push_back(best);
    out.log_prob += log_probs[best];
    if (best == Vocabulary::kEos) break;
    state = std::move(next);
    prev = best;
  }
  return out;
}

template <StepModel M>
Decoded sample_search(const M& model, double tau, std::size_t max_len, Rng& rng) {
  Decoded out;
  auto state = model.initial_state();
  TokenId prev = Vocabulary::kBos;
  while (out.ids.size() < max_len) {
    auto [log_probs, next] = model.step(state, prev);
    const Vector tempered = apply_temperature_log(log_probs, tau);
    const auto token = static_cast<TokenId>(sample_index(tempered, rng));
    out.ids.push_back(token);
    out.log_prob += log_probs[token];
    if (token == Vocabulary::kEos) break;
    state = std::move(next);
    prev = token;
  }
  return out;
}

// Beam search without length normalisation. Finished hypotheses stay in the
// beam and compete on raw score; each step keeps the best `width` of the
// finished ones plus every one-token extension of the live ones, ties going
// to the lexicographically smaller id sequence. Returns the final beam,
// best first.
template <StepModel M>
std::vector<Decoded> beam_search(const M& model, std::size_t width, std::size_t max_len) {
  using State = typename M::State;
  if (width < 1) throw ConfigError("beam width must be >= 1");
  if (max_len < 1) throw ConfigError("max_len must be >= 1");

  struct Hyp {
    Decoded decoded;
    State state;
    bool finished = false;
  };
  const auto better = [](const Decoded& a, const Decoded& b) {
    if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
    return a.ids < b.ids;
  };

  std::vector<Hyp> beam;
  beam.push_back({Decoded{}, model.initial_state(), false});
  struct Candidate {
    Decoded decoded;
    std::size_t parent;  // index into beam, or npos for a carried-over finished hyp
    bool finished;
  };
  constexpr std::size_t kCarried = static_cast<std::size_t>(-1);

  while (true) {
    const bool any_live = std::any_of(beam.begin(), beam.end(), [](const Hyp& h) { return !h.finished; });
    if (!any_live) break;

    std::vector<Candidate> candidates;
    std::vector<State> next_states(beam.size());
    for (std::size_t h = 0; h < beam.size(); ++h) {
      const Hyp& hyp = beam[h];
      if (hyp.finished) {
        candidates.push_back({hyp.decoded, kCarried, true});
        continue;
      }
      const TokenId prev = hyp.decoded.ids.empty() ? Vocabulary::kBos : hyp.decoded.ids.back();
      auto [log_probs, next] = model.step(hyp.state, prev);
      next_states[h] = std::move(next);
      for (std::size_t v = 0; v < log_probs.size(); ++v) {
        Candidate c{hyp.decoded, h, false};
        c.decoded.ids.push_back(static_cast<TokenId>(v));
        c.decoded.log_prob += log_probs[v];
        c.finished = v == Vocabulary::kEos || c.decoded.ids.size() >= max_len;
        candidates.push_back(std::move(c));
      }
    }
    const std::size_t keep = std::min(width, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      [&](const Candidate& a, const Candidate& b) { return better(a.decoded, b.decoded); });

    std::vector<Hyp> next_beam;
    next_beam.reserve(keep);
    for (std::size_t k = 0; k < keep; ++k) {
      Candidate& c = candidates[k];
      if (c.parent == kCarried) {
        next_beam.push_back({std::move(c.decoded), State{}, true});
      } else {
        next_beam.push_back({std::move(c.decoded), c.finished ? State{} : next_states[c.parent], c.finished});
      }
    }
    beam = std::move(next_beam);
  }

  std::vector<Decoded> out;
  out.reserve(beam.size());
  for (Hyp& h : beam) out.push_back(std::move(h.decoded));
  std::sort(out.begin(), out.end(), better);
  return out;
}

// Step model over a trained seq2seq network for one source sentence.
class Seq2SeqStepModel {
 public:
  using State = LstmState;

  Seq2SeqStepModel(const Seq2SeqParams& params, std::span<const TokenId> source)
      : params_(&params), encoded_(encode(params, source)) {}

  State initial_state() const { return encoded_.final_state; }
  std::pair<Vector, State> step(const State& state, TokenId prev) const;
  std::size_t vocab_size() const { return params_->output_weights.rows; }

 private:
  const Seq2SeqParams* params_;
  EncoderOutput encoded_;
};

// A corruption of one source sentence. `ids` are the model's output ids
// (possibly ending in EOS); `sentence` has EOS stripped and every UNK
// replaced by the source word it attended to most.
struct Corruption {
  Sentence sentence;
  double log_prob = 0.0;
  std::vector<TokenId> ids;
};

// All three throw EmptyInput for an empty source.
Corruption greedy_decode(const Corruptor& model, const Sentence& source, const DecodeConfig& config);
Corruption temperature_decode(const Corruptor& model, const Sentence& source, const DecodeConfig& config);
std::vector<Corruption> beam_decode(const Corruptor& model, const Sentence& source, const DecodeConfig& config);

// Surface form for decoded ids, with UNK copied from the source.
Sentence realize(const Corruptor& model, const Sentence& source, std::span<const TokenId> source_ids,
                 std::span<const TokenId> output_ids);

}  // namespace wrongsmith
