#pragma once

#include <filesystem>
#include <functional>
#include <optional>

#include <httplib.h>

#include "wrongsmith/eval.hpp"
#include "wrongsmith/turing.hpp"

namespace wrongsmith {

struct TuringRoutesOptions {
  // Static annotation UI; a small built-in page is served when absent.
  std::optional<std::filesystem::path> ui_dir;
  // Called once, with the final metrics, when the session closes.
  std::function<void(const DetectionMetrics&)> on_close;
};

// JSON API over the session:
//   GET  /api/session   -> 200 {"items":[{"id","text"}]}
//   POST /api/judgment  {"id","synthetic":bool} -> 204 (400 bad body, 404 unknown id, 409 closed)
//   POST /api/close     -> 200 metrics JSON
//   GET  /api/results   -> 200 metrics JSON after close, 409 before
void register_turing_routes(httplib::Server& server, TuringSession& session, TuringRoutesOptions options);

}  // namespace wrongsmith
