// Runs the desk-scale augmentation experiment on the toy language and prints
// one line per seed plus per-strategy summaries.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <vector>

#include <CLI11.hpp>

#include "wrongsmith/decode.hpp"
#include "wrongsmith/experiment.hpp"

using namespace wrongsmith;

int main(int argc, char** argv) {
  CLI::App app{"Toy-language augmentation experiment"};
  std::size_t seeds = 10;
  std::uint64_t first_seed = 1;
  bool verbose = false;
  app.add_option("--seeds", seeds)->capture_default_str();
  app.add_option("--first-seed", first_seed)->capture_default_str();
  app.add_flag("-v,--verbose", verbose);
  CLI11_PARSE(app, argc, argv);

  const auto config = experiment::Config::desk_scale();
  std::vector<experiment::SeedResult> results;
  for (std::size_t i = 0; i < seeds; ++i) {
    const auto r = experiment::run_seed(first_seed + i, config, verbose ? &std::cerr : nullptr);
    std::cout << "seed " << r.seed << " baseline " << r.baseline_f05;
    for (const auto& [s, f] : r.strategy_f05) std::cout << ' ' << strategy_name(s) << ' ' << f;
    std::cout << " volumes";
    for (double f : r.volume_f05) std::cout << ' ' << f;
    std::cout << " | corruptor epochs " << r.corruptor_epochs << " dev " << r.corruptor_dev_loss << " pools";
    for (const auto& [s, n] : r.pool_size) std::cout << ' ' << strategy_name(s) << '=' << n;
    std::cout << " err_rate " << r.synthetic_error_rate << " (" << r.seconds << " s)\n" << std::flush;
    results.push_back(r);
  }
  return 0;
}
