#include "wrongsmith/turing_http.hpp"

#include <atomic>
#include <memory>

#include <json.hpp>

namespace wrongsmith {
namespace {

constexpr const char* kJson = "application/json";

constexpr const char* kFallbackPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>wrongsmith annotation</title></head>
<body>
<p>No annotation UI bundle was configured. The session API is available at
<code>/api/session</code>, <code>/api/judgment</code>, <code>/api/close</code> and
<code>/api/results</code>.</p>
</body></html>
)";

void error_body(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(nlohmann::json{{"error", message}}.dump(), kJson);
}

}  // namespace

void register_turing_routes(httplib::Server& server, TuringSession& session, TuringRoutesOptions options) {
  auto closed_once = std::make_shared<std::atomic<bool>>(false);
  auto on_close = std::make_shared<std::function<void(const DetectionMetrics&)>>(std::move(options.on_close));

  server.Get("/api/session", [&session](const httplib::Request&, httplib::Response& res) {
    res.set_content(session.items_json(), kJson);
  });

  server.Post("/api/judgment", [&session](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception&) {
      return error_body(res, 400, "body is not JSON");
    }
    if (!body.is_object() || !body.contains("id") || !body["id"].is_string() || !body.contains("synthetic") ||
        !body["synthetic"].is_boolean()) {
      return error_body(res, 400, "expected {\"id\": string, \"synthetic\": bool}");
    }
    try {
      session.judge(body["id"].get<std::string>(), body["synthetic"].get<bool>());
      res.status = 204;
    } catch (const KeyError& e) {
      error_body(res, 404, e.what());
    } catch (const SessionClosed& e) {
      error_body(res, 409, e.what());
    }
  });

  server.Post("/api/close", [&session, closed_once, on_close](const httplib::Request&, httplib::Response& res) {
    const DetectionMetrics m = session.close();
    if (!closed_once->exchange(true) && *on_close) (*on_close)(m);
    res.set_content(metrics_json(m), kJson);
  });

  server.Get("/api/results", [&session](const httplib::Request&, httplib::Response& res) {
    try {
      res.set_content(metrics_json(session.results()), kJson);
    } catch (const SessionOpen& e) {
      error_body(res, 409, e.what());
    }
  });

  if (options.ui_dir && server.set_mount_point("/", options.ui_dir->string())) return;
  server.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content(kFallbackPage, "text/html"); });
}

}  // namespace wrongsmith
