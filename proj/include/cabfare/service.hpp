#pragma once

#include <memory>
#include <string>

#include "cabfare/engine.hpp"

namespace httplib {
class Server;
}

namespace cabfare {

/// HTTP front end over an Engine:
///   POST /api/v1/estimate           GET /api/v1/geocode?city&q
///   POST /api/v1/feedback           GET /api/v1/feedback
///   GET  /api/v1/stats/savings?city&from&to
///   GET  /api/v1/cities             GET /healthz
class Service {
 public:
  explicit Service(Engine& engine);
  ~Service();

  /// Serves static files (e.g. a built web client) under "/".
  /// Returns false if `dir` is not a directory.
  bool mount_static(std::string const& dir);

  Service(Service const&) = delete;
  Service& operator=(Service const&) = delete;

  /// Binds and serves until stop(). Returns false if binding failed.
  bool listen(std::string const& host, int port);

  /// Binds to an ephemeral port and returns it (or -1); serve with run().
  int bind_any(std::string const& host);
  bool run();

  void stop();
  bool running() const;

 private:
  Engine& engine_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace cabfare
