#include "wrongsmith/experiment.hpp"

#include <algorithm>
#include <chrono>

#include "wrongsmith/align.hpp"
#include "wrongsmith/eval.hpp"
#include "wrongsmith/random.hpp"

namespace wrongsmith::experiment {

Config Config::desk_scale() {
  Config c;
  c.sizes.corruptor_dev = 200;
  c.sizes.real_dev = 150;
  c.sizes.test = 600;
  c.sizes.clean_pool = 1500;
  c.corruptor.cell_size = 32;
  c.corruptor.emb_size = 24;
  c.corruptor.learning_rate = 0.7;
  c.corruptor.batch_size = 2;
  c.corruptor.patience = 6;
  c.corruptor.max_epochs = 40;

  c.detector.cell_size = 24;
  c.detector.emb_size = 24;
  c.detector.learning_rate = 1.0;
  c.detector.batch_size = 4;
  c.detector.patience = 10;
  c.detector.alternation = Alternation::kEpoch;
  c.detector.end_on_real = true;

  c.build.samples_per_source = 10;
  c.build.max_errors = 5;
  c.build.decode.tau = 0.05;
  c.build.decode.beam_width = 11;
  return c;
}

double detector_f05(const toy::Split& split, const std::vector<LabeledSentence>& synthetic, const Config& config,
                    std::uint64_t seed) {
  DetectorTrainConfig cfg = config.detector;
  cfg.seed = seed;
  cfg.max_epochs = synthetic.empty() ? config.detector_real_epochs : 2 * config.detector_real_epochs;
  const DetectorTrainResult trained = train_detector(split.real_train, synthetic, split.real_dev, cfg);
  return prf(predict_all(trained.best, split.test, cfg.threshold), split.test, 0.5).f;
}

SeedResult run_seed(std::uint64_t seed, const Config& config, std::ostream* log) {
  const auto started = std::chrono::steady_clock::now();
  const auto phase = [&](const char* what) {
    if (log) {
      *log << "  [" << std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() << " s] "
           << what << "\n";
    }
  };
  SeedResult result;
  result.seed = seed;

  const toy::Split split = toy::make_split(mix_seed(seed, 1), config.sizes, config.rates);

  std::vector<Sentence> vocab_corpus;
  for (const ParallelPair& p : split.corruptor_train) {
    vocab_corpus.push_back(p.source);
    vocab_corpus.push_back(p.target);
  }
  Corruptor corruptor;
  corruptor.vocab = Vocabulary::build(vocab_corpus);
  TrainConfig ccfg = config.corruptor;
  ccfg.seed = mix_seed(seed, 2);
  const auto train_pairs = corruptor.encode_pairs(split.corruptor_train);
  const auto dev_pairs = corruptor.encode_pairs(split.corruptor_dev);
  const TrainResult trained =
      train(init_seq2seq(ccfg.seed, {corruptor.vocab.size(), ccfg.emb_size, ccfg.cell_size}), train_pairs, dev_pairs,
            ccfg, [&](const EpochRecord& r) {
              if (log) *log << "  corruptor epoch " << r.epoch << " train " << r.train_loss << " dev " << r.dev_loss << "\n";
            });
  corruptor.params = trained.best;
  phase("corruptor trained");
  result.corruptor_epochs = trained.history.size();
  result.corruptor_dev_loss = trained.history[trained.best_epoch - 1].dev_loss;

  const std::size_t real_size = split.real_train.size();
  std::map<Strategy, std::vector<LabeledSentence>> pools;
  for (Strategy s : {Strategy::kArgmax, Strategy::kTemperature, Strategy::kBeam}) {
    BuildConfig build = config.build;
    build.decode.strategy = s;
    build.decode.seed = mix_seed(seed, 3);
    // Beam search yields k outputs per source; a prefix of the clean pool
    // already covers the 1x volume it is compared at.
    std::vector<Sentence> sources = split.clean_pool;
    if (s == Strategy::kBeam) sources.resize(std::min(sources.size(), config.beam_sources));
    std::vector<LabeledSentence> pool = build_labeled(corrupt_corpus(corruptor, sources, build), build);
    Rng rng(mix_seed(seed, 4, static_cast<std::uint64_t>(s)));
    rng.shuffle(std::span<LabeledSentence>(pool));
    result.pool_size[s] = pool.size();
    phase(strategy_name(s));
    pools[s] = std::move(pool);
  }
  {
    std::size_t tokens = 0, errors = 0;
    for (const auto& s : pools[Strategy::kTemperature]) {
      tokens += s.size();
      errors += count_errors(s);
    }
    result.synthetic_error_rate = tokens ? static_cast<double>(errors) / static_cast<double>(tokens) : 0.0;
  }

  const auto take = [&](Strategy s, std::size_t n) {
    const auto& pool = pools[s];
    return std::vector<LabeledSentence>(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(std::min(n, pool.size())));
  };

  const std::uint64_t detector_seed = mix_seed(seed, 5);
  result.baseline_f05 = detector_f05(split, {}, config, detector_seed);
  phase("baseline detector");
  for (Strategy s : {Strategy::kArgmax, Strategy::kTemperature, Strategy::kBeam}) {
    result.strategy_f05[s] = detector_f05(split, take(s, real_size), config, detector_seed);
    phase("detector");
  }
  for (std::size_t v : config.volumes) {
    double f;
    if (v == 0) {
      f = result.baseline_f05;
    } else if (v == 1) {
      f = result.strategy_f05[Strategy::kTemperature];
    } else {
      f = detector_f05(split, take(Strategy::kTemperature, v * real_size), config, detector_seed);
    }
    result.volume_f05.push_back(f);
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace wrongsmith::experiment
