#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wrongsmith/corpus.hpp"
#include "wrongsmith/error.hpp"
#include "wrongsmith/eval.hpp"

namespace wrongsmith {

class SessionClosed : public Error {
 public:
  SessionClosed() : Error("session is closed") {}
};

class SessionOpen : public Error {
 public:
  SessionOpen() : Error("session is still open") {}
};

// One Turing-style annotation session: n real and n synthetic sentences in a
// seeded shuffle. Ids are assigned after shuffling so they carry no hint of
// the answer. All members are safe to call from concurrent handlers.
class TuringSession {
 public:
  struct Item {
    std::string id;
    std::string text;
  };

  // Draws n sentences from each pool with a seeded sample. Throws
  // ConfigError when either pool has fewer than n sentences or n == 0.
  TuringSession(const std::vector<Sentence>& real, const std::vector<Sentence>& synthetic, std::size_t n,
                std::uint64_t seed);

  const std::vector<Item>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }

  // Last write wins. Throws KeyError for an unknown id, SessionClosed after close().
  void judge(const std::string& id, bool synthetic);

  // Scores the judgments (unjudged = not flagged) and locks the session.
  // Closing twice returns the same metrics.
  DetectionMetrics close();
  bool closed() const;
  // Throws SessionOpen before close().
  DetectionMetrics results() const;

  std::size_t judged() const;

  // {"items":[{"id":..,"text":..}, ...]} with no answer information.
  std::string items_json() const;

  // Server-side only.
  std::vector<std::pair<std::string, bool>> answer_key() const;

 private:
  std::vector<Item> items_;
  std::map<std::string, bool> key_;
  mutable std::mutex mutex_;
  std::vector<std::pair<std::string, bool>> judgments_;
  std::optional<DetectionMetrics> results_;
};

}  // namespace wrongsmith
