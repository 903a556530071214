#include "cabfare/service.hpp"

#include <httplib.h>

namespace cabfare {

using nlohmann::json;

namespace {

constexpr auto kJson = "application/json";

void reply(httplib::Response& res, int status, json const& body) {
  res.status = status;
  res.set_content(body.dump() + "\n", kJson);
}

/// Runs `fn` and turns library errors into their status + error body.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (Error const& e) {
    reply(res, http_status(e), error_body(e));
  } catch (json::exception const& e) {
    reply(res, 400, {{"error", "InvalidInput"}, {"message", e.what()}});
  } catch (std::exception const& e) {
    reply(res, 500, {{"error", "Internal"}, {"message", e.what()}});
  }
}

json parse_body(httplib::Request const& req) {
  try {
    return json::parse(req.body);
  } catch (json::parse_error const& e) {
    throw InvalidInput(std::string{"malformed JSON body: "} + e.what());
  }
}

std::string param(httplib::Request const& req, char const* key) {
  return req.has_param(key) ? req.get_param_value(key) : std::string{};
}

std::string required(httplib::Request const& req, char const* key) {
  auto v = param(req, key);
  if (v.empty()) {
    throw InvalidInput(std::string{"query parameter '"} + key + "' is required");
  }
  return v;
}

}  // namespace

Service::Service(Engine& engine) : engine_(engine), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  s.Options(R"(/api/v1/.*)", [](auto const&, auto& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  s.Get("/healthz", [](auto const&, auto& res) { res.set_content("ok", "text/plain"); });

  s.Post("/api/v1/estimate", [this](auto const& req, auto& res) {
    guarded(res, [&] { reply(res, 200, engine_.estimate(parse_body(req))); });
  });

  s.Get("/api/v1/geocode", [this](auto const& req, auto& res) {
    guarded(res, [&] {
      reply(res, 200, engine_.geocode(required(req, "city"), param(req, "q")));
    });
  });

  s.Post("/api/v1/feedback", [this](auto const& req, auto& res) {
    guarded(res, [&] { reply(res, 201, engine_.submit_feedback(parse_body(req))); });
  });

  s.Get("/api/v1/feedback", [this](auto const&, auto& res) {
    guarded(res, [&] { reply(res, 200, engine_.feedback()); });
  });

  s.Get("/api/v1/stats/savings", [this](auto const& req, auto& res) {
    guarded(res, [&] {
      reply(res, 200,
            engine_.savings(required(req, "city"), param(req, "from"), param(req, "to")));
    });
  });

  s.Get("/api/v1/cities", [this](auto const&, auto& res) {
    guarded(res, [&] { reply(res, 200, engine_.cities()); });
  });
}

Service::~Service() { stop(); }

bool Service::mount_static(std::string const& dir) { return server_->set_mount_point("/", dir); }

bool Service::listen(std::string const& host, int port) { return server_->listen(host, port); }

int Service::bind_any(std::string const& host) { return server_->bind_to_any_port(host); }

bool Service::run() { return server_->listen_after_bind(); }

void Service::stop() {
  if (server_->is_running()) {
    server_->stop();
  }
}

bool Service::running() const { return server_->is_running(); }

}  // namespace cabfare
