#include "wrongsmith/turing.hpp"

#include <numeric>

#include <json.hpp>

#include "wrongsmith/random.hpp"

namespace wrongsmith {
namespace {

std::vector<std::size_t> sample_indices(std::size_t pool, std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(pool);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(idx));
  idx.resize(n);
  return idx;
}

}  // namespace

TuringSession::TuringSession(const std::vector<Sentence>& real, const std::vector<Sentence>& synthetic,
                             std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("session size must be > 0");
  if (real.size() < n) throw ConfigError("need " + std::to_string(n) + " real sentences, have " + std::to_string(real.size()));
  if (synthetic.size() < n) {
    throw ConfigError("need " + std::to_string(n) + " synthetic sentences, have " + std::to_string(synthetic.size()));
  }
  Rng rng(seed);
  std::vector<std::pair<std::string, bool>> pool;
  for (std::size_t i : sample_indices(real.size(), n, rng)) pool.emplace_back(join(real[i]), false);
  for (std::size_t i : sample_indices(synthetic.size(), n, rng)) pool.emplace_back(join(synthetic[i]), true);
  rng.shuffle(std::span<std::pair<std::string, bool>>(pool));

  const std::size_t width = std::to_string(pool.size()).size();
  for (std::size_t k = 0; k < pool.size(); ++k) {
    std::string id = std::to_string(k + 1);
    id.insert(0, width - id.size(), '0');
    items_.push_back({id, pool[k].first});
    key_[id] = pool[k].second;
  }
}

void TuringSession::judge(const std::string& id, bool synthetic) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (results_) throw SessionClosed();
  if (!key_.count(id)) throw KeyError(id);
  judgments_.emplace_back(id, synthetic);
}

DetectionMetrics TuringSession::close() {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!results_) {
    std::vector<std::pair<std::string, bool>> key(key_.begin(), key_.end());
    results_ = score_turing(judgments_, key);
  }
  return *results_;
}

bool TuringSession::closed() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return results_.has_value();
}

DetectionMetrics TuringSession::results() const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!results_) throw SessionOpen();
  return *results_;
}

std::size_t TuringSession::judged() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::map<std::string, bool> distinct(judgments_.begin(), judgments_.end());
  return distinct.size();
}

std::string TuringSession::items_json() const {
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  for (const Item& item : items_) {
    nlohmann::ordered_json j;
    j["id"] = item.id;
    j["text"] = item.text;
    items.push_back(std::move(j));
  }
  nlohmann::ordered_json out;
  out["items"] = std::move(items);
  return out.dump();
}

std::vector<std::pair<std::string, bool>> TuringSession::answer_key() const {
  return {key_.begin(), key_.end()};
}

}  // namespace wrongsmith
