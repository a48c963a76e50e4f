#include "wrongsmith/eval.hpp"

#include <cstdio>
#include <map>

#include <json.hpp>

#include "wrongsmith/error.hpp"

namespace wrongsmith {

double f_beta(double precision, double recall, double beta) {
  if (precision + recall == 0.0) return 0.0;
  const double b2 = beta * beta;
  return (1.0 + b2) * precision * recall / (b2 * precision + recall);
}

DetectionMetrics DetectionMetrics::from_counts(std::size_t tp, std::size_t fp, std::size_t fn, double beta) {
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  DetectionMetrics m;
    m.tp = tp;
    m.fp = fp;
  m.fn = fn;
    m.beta = beta;
    m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f = f_beta(m.precision, m.recall, beta);
  return m;
}

DetectionMetrics prf(const std::vector<LabeledSentence>& pred, const std::vector<LabeledSentence>& gold, double beta) {
  if (pred.size() != gold.size()) {
    throw ShapeError(std::min(pred.size(), gold.size()), "prediction and gold sentence counts differ");
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t s = 0; s < pred.size(); ++s) {
    if (pred[s].labels.size() != gold[s].labels.size()) throw ShapeError(s, "token counts differ");
    for (std::size_t j = 0; j < pred[s].labels.size(); ++j) {
      const bool p = pred[s].labels[j] == Label::kIncorrect;
      const bool g = gold[s].labels[j] == Label::kIncorrect;
      tp += p && g;
      fp += p && !g;
      fn += !p && g;
    }
  }
  return DetectionMetrics::from_counts(tp, fp, fn, beta);
}

DetectionMetrics score_turing(const std::vector<std::pair<std::string, bool>>& judgments,
                              const std::vector<std::pair<std::string, bool>>& key) {
  std::map<std::string, bool> truth(key.begin(), key.end());
  std::map<std::string, bool> flagged;
  for (const auto& [id, says_synthetic] : judgments) {
    if (!truth.count(id)) throw KeyError(id);
    flagged[id] = says_synthetic;
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& [id, synthetic] : truth) {
    auto it = flagged.find(id);
    const bool flag = it != flagged.end() && it->second;
    tp += flag && synthetic;
    fp += flag && !synthetic;
    fn += !flag && synthetic;
  }
  return DetectionMetrics::from_counts(tp, fp, fn, 1.0);
}

std::string metrics_json(const DetectionMetrics& m) {
  nlohmann::ordered_json j;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f"] = m.f;
  j["beta"] = m.beta;
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["fn"] = m.fn;
  return j.dump();
}

DetectionMetrics parse_metrics_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    DetectionMetrics m;
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f = j.at("f").get<double>();
    m.beta = j.at("beta").get<double>();
    m.tp = j.at("tp").get<std::size_t>();
    m.fp = j.at("fp").get<std::size_t>();
    m.fn = j.at("fn").get<std::size_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("metrics JSON: ") + e.what());
  }
}

std::string metrics_human(const DetectionMetrics& m) {
  char beta[32];
  std::snprintf(beta, sizeof beta, "%g", m.beta);
  char buf[160];
  std::snprintf(buf, sizeof buf, "P %.2f / R %.2f / F%s %.2f (tp %zu, fp %zu, fn %zu)", 100.0 * m.precision,
                100.0 * m.recall, beta, 100.0 * m.f, m.tp, m.fp, m.fn);
  return buf;
}

}  // namespace wrongsmith
