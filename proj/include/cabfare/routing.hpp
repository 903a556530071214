#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "cabfare/geo.hpp"

namespace cabfare {

struct RouteSegment {
  double length_m = 0.0;
  double duration_s = 0.0;

  friend bool operator==(RouteSegment const&, RouteSegment const&) = default;
};

/// Throws InvalidRoute for negative/non-finite fields or a 0 m / 0 s segment.
void validate(RouteSegment const& s);

struct Route {
  GeoPoint origin;
  GeoPoint destination;
  std::vector<RouteSegment> segments;

  double total_length_m() const noexcept;
  double total_duration_s() const noexcept;

  friend bool operator==(Route const&, Route const&) = default;
};

/// Checks every segment, and that an empty route has origin == destination.
void validate(Route const& r);

/// Single-segment straight-line route at constant speed; empty if the
/// endpoints coincide.
Route synthetic_route(GeoPoint const& origin, GeoPoint const& destination,
                      double speed_mps);

/// Route source. Implementations must tolerate concurrent `route()` calls.
class RoutingProvider {
 public:
  virtual ~RoutingProvider() = default;

  /// Throws RouteNotFound or ProviderUnavailable.
  virtual Route route(GeoPoint const& origin, GeoPoint const& destination) const = 0;
};

class SyntheticRouter final : public RoutingProvider {
 public:
  explicit SyntheticRouter(double speed_mps);
  Route route(GeoPoint const& origin, GeoPoint const& destination) const override;

 private:
  double speed_mps_;
};

/// Routes looked up from a fixture table keyed on endpoints rounded to
/// five decimal places.
class FixtureRouter final : public RoutingProvider {
 public:
  FixtureRouter() = default;

  /// Parses the fixture JSON array. Throws ConfigError on malformed input.
  static FixtureRouter from_json(nlohmann::json const& fixture);
  static FixtureRouter from_file(std::string const& path);

  void add(Route route);
  std::size_t size() const noexcept { return routes_.size(); }
  std::vector<Route> routes() const;

  Route route(GeoPoint const& origin, GeoPoint const& destination) const override;

 private:
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t>;
  static Key key_of(GeoPoint const& origin, GeoPoint const& destination);

  std::map<Key, Route> routes_;
};

/// Tries `primary`; on RouteNotFound asks `fallback`.
class FallbackRouter final : public RoutingProvider {
 public:
  FallbackRouter(std::shared_ptr<RoutingProvider const> primary,
                 std::shared_ptr<RoutingProvider const> fallback);
  Route route(GeoPoint const& origin, GeoPoint const& destination) const override;

 private:
  std::shared_ptr<RoutingProvider const> primary_;
  std::shared_ptr<RoutingProvider const> fallback_;
};

/// Client for a routing gateway speaking
///   GET <base>/route?olat=..&olng=..&dlat=..&dlng=..
/// answered by 200 and {"segments":[{length_m,duration_s},...]} (a bare
/// segment array is accepted too). Non-200 or transport failure raises
/// ProviderUnavailable; an empty segment list for distinct endpoints
/// raises RouteNotFound.
class HttpRouter final : public RoutingProvider {
 public:
  /// `base_url` like "http://127.0.0.1:9000" (optionally with a path prefix).
  explicit HttpRouter(std::string base_url,
                      std::chrono::milliseconds timeout = std::chrono::seconds{5});
  Route route(GeoPoint const& origin, GeoPoint const& destination) const override;

 private:
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::chrono::milliseconds timeout_;
};

std::vector<RouteSegment> parse_segments(nlohmann::json const& j);
nlohmann::json to_json(Route const& r);

}  // namespace cabfare
