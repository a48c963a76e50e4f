#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include "wrongsmith/dataset.hpp"
#include "wrongsmith/detector.hpp"
#include "wrongsmith/seq2seq.hpp"
#include "wrongsmith/toy_language.hpp"

// Desk-scale augmentation experiment on the toy language: train a corruptor
// on erroneous/clean pairs, corrupt a clean pool with each strategy, and
// compare error detectors trained with and without the synthetic data.
namespace wrongsmith::experiment {

struct Config {
  toy::SplitSizes sizes;
  toy::ErrorRates rates;
  TrainConfig corruptor;
  DetectorTrainConfig detector;
  BuildConfig build;
  // Synthetic volume as multiples of the real training set; TS only.
  std::vector<std::size_t> volumes{0, 1, 2, 3, 4};
  // Cap on real-data epochs; augmented runs get twice as many epochs total.
  std::size_t detector_real_epochs = 100;
  // Clean sentences corrupted by beam search (from the front of the pool).
  std::size_t beam_sources = 400;

  static Config desk_scale();
};

struct SeedResult {
  std::uint64_t seed = 0;
  double baseline_f05 = 0.0;
  std::map<Strategy, double> strategy_f05;  // at 1x volume
  std::map<Strategy, std::size_t> pool_size;
  std::vector<double> volume_f05;           // parallel to Config::volumes
  std::size_t corruptor_epochs = 0;
  double corruptor_dev_loss = 0.0;
  double synthetic_error_rate = 0.0;        // 'i' share of TS synthetic tokens
  double seconds = 0.0;
};

SeedResult run_seed(std::uint64_t seed, const Config& config, std::ostream* log = nullptr);

// Trains one detector on real (+ synthetic) data and scores it on test.
double detector_f05(const toy::Split& split, const std::vector<LabeledSentence>& synthetic, const Config& config,
                    std::uint64_t seed);

}  // namespace wrongsmith::experiment
