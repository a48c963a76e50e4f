#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "wrongsmith/corpus.hpp"

namespace wrongsmith {

struct DetectionMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  double beta = 1.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  // P, R and F_beta from counts; 0 wherever a denominator is 0.
  static DetectionMetrics from_counts(std::size_t tp, std::size_t fp, std::size_t fn, double beta);
};

double f_beta(double precision, double recall, double beta);

// Token-level scores with 'i' as the positive class. Throws ShapeError
// naming the first sentence whose lengths disagree, ConfigError for beta <= 0.
DetectionMetrics prf(const std::vector<LabeledSentence>& pred, const std::vector<LabeledSentence>& gold, double beta);

// Turing-test scoring with "synthetic" as the positive class. Unjudged items
// count as not flagged; a judged id missing from the key throws KeyError.
// Later judgments of the same id replace earlier ones.
DetectionMetrics score_turing(const std::vector<std::pair<std::string, bool>>& judgments,
                              const std::vector<std::pair<std::string, bool>>& key);

// {"precision":p,"recall":r,"f":f,"beta":b,"tp":..,"fp":..,"fn":..} as fractions.
std::string metrics_json(const DetectionMetrics& m);
DetectionMetrics parse_metrics_json(const std::string& text);
// Percentages with two decimals, e.g. "P 81.25 / R 26.00 / F1 39.39".
std::string metrics_human(const DetectionMetrics& m);

}  // namespace wrongsmith
