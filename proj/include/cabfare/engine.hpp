#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "cabfare/config.hpp"
#include "cabfare/error.hpp"
#include "cabfare/query_log.hpp"

namespace cabfare {

struct EngineOptions {
  /// Query log file; the feedback log sits next to it. Memory-only if unset.
  std::optional<std::filesystem::path> log_path;
  /// Time used when a request omits one.
  std::function<Timestamp()> clock = local_now;
};

/// Request handling shared by the HTTP service and the CLI. Every method
/// takes and returns JSON documents and reports failures as Error
/// exceptions, which callers map with http_status() / exit_code().
class Engine {
 public:
  explicit Engine(Config config, EngineOptions options = {});

  Config const& config() const noexcept { return config_; }
  QueryLog const& query_log() const noexcept { return *queries_; }
  FeedbackLog const& feedback_log() const noexcept { return *feedback_; }

  /// Body: {city, origin{lat,lng}, destination{lat,lng}, time?,
  /// surge_multiplier?, user_id?}. Throws InvalidInput / UnknownCity.
  JourneyQuery parse_estimate_request(nlohmann::json const& body) const;

  /// Compares providers and persists the result. A partial comparison
  /// raises ProviderUnavailable and persists nothing.
  nlohmann::json estimate(nlohmann::json const& body);

  nlohmann::json geocode(std::string const& city, std::string const& query) const;
  nlohmann::json cities() const;

  /// Body: {text, user_id?, query_id?, provider?, actual_fare?, currency?}.
  nlohmann::json submit_feedback(nlohmann::json const& body);
  nlohmann::json feedback() const;

  /// `from` / `to` are RFC 3339 instants or empty.
  nlohmann::json savings(std::string const& city, std::string const& from,
                         std::string const& to) const;

 private:
  Config config_;
  EngineOptions options_;
  std::unique_ptr<QueryLog> queries_;
  std::unique_ptr<FeedbackLog> feedback_;
};

/// Path of the feedback log belonging to a query log.
std::filesystem::path feedback_path_for(std::filesystem::path const& log_path);

nlohmann::json error_body(Error const& e);
int http_status(Error const& e);
/// 1 configuration/storage, 2 upstream provider, 3 user input.
int exit_code(Error const& e);

}  // namespace cabfare
