// Serial reference vs OpenMP kernels: seq2seq batch gradient, detector batch
// gradient and corpus corruption. Results are bit-identical; only time differs.

#include <benchmark/benchmark.h>

#include "wrongsmith/dataset.hpp"
#include "wrongsmith/detector.hpp"
#include "wrongsmith/seq2seq.hpp"
#include "wrongsmith/toy_language.hpp"

using namespace wrongsmith;

namespace {

struct Fixture {
  Corruptor corruptor;
  std::vector<EncodedPair> pairs;
  DetectorParams detector;
  std::vector<EncodedLabeled> labeled;
  std::vector<Sentence> clean;

  Fixture() {
    toy::SplitSizes sizes;
    sizes.corruptor_train = 64;
    sizes.corruptor_dev = 0;
    sizes.real_train = 64;
    sizes.real_dev = 0;
    sizes.test = 0;
    sizes.clean_pool = 32;
    const toy::Split split = toy::make_split(1, sizes);
    std::vector<Sentence> corpus;
    for (const auto& p : split.corruptor_train) {
      corpus.push_back(p.source);
      corpus.push_back(p.target);
    }
    corruptor.vocab = Vocabulary::build(corpus);
    corruptor.params = init_seq2seq(1, {corruptor.vocab.size(), 32, 64});
    pairs = corruptor.encode_pairs(split.corruptor_train);

    Detector d;
    d.vocab = corruptor.vocab;
    d.params = init_detector(2, {d.vocab.size(), 32, 64});
    detector = d.params;
    labeled = d.encode_all(split.real_train);
    clean = split.clean_pool;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Seq2SeqGrad(benchmark::State& state, bool parallel) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? grad(f.corruptor.params, f.pairs) : grad_serial(f.corruptor.params, f.pairs));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.pairs.size()));
}

void BM_DetectorGrad(benchmark::State& state, bool parallel) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? detector_grad(f.detector, f.labeled) : detector_grad_serial(f.detector, f.labeled));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.labeled.size()));
}

void BM_CorruptCorpus(benchmark::State& state, bool parallel) {
  const Fixture& f = fixture();
  BuildConfig cfg;
  cfg.decode.strategy = Strategy::kTemperature;
  cfg.decode.tau = 0.5;
  cfg.samples_per_source = 4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? corrupt_corpus(f.corruptor, f.clean, cfg)
                                      : corrupt_corpus_serial(f.corruptor, f.clean, cfg));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.clean.size()));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Seq2SeqGrad, serial, false)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(BM_Seq2SeqGrad, openmp, true)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(BM_DetectorGrad, serial, false)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(BM_DetectorGrad, openmp, true)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(BM_CorruptCorpus, serial, false)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(BM_CorruptCorpus, openmp, true)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
