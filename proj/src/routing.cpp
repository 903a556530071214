#include "cabfare/routing.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "cabfare/error.hpp"

namespace cabfare {

using nlohmann::json;

namespace {

std::string coord(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

GeoPoint point_from_json(json const& j, char const* what) {
  if (!j.is_object() || !j.contains("lat") || !j.contains("lng") ||
      !j["lat"].is_number() || !j["lng"].is_number()) {
    throw ConfigError(std::string{what} + " must be {lat, lng}");
  }
  GeoPoint p{j["lat"].get<double>(), j["lng"].get<double>()};
  if (!is_valid(p)) {
    throw ConfigError(std::string{what} + " out of range");
  }
  return p;
}

}  // namespace

void validate(RouteSegment const& s) {
  if (!std::isfinite(s.length_m) || !std::isfinite(s.duration_s) ||
      s.length_m < 0.0 || s.duration_s < 0.0) {
    throw InvalidRoute("segment length and duration must be finite and >= 0");
  }
  if (s.length_m == 0.0 && s.duration_s == 0.0) {
    throw InvalidRoute("segment with zero length and zero duration");
  }
}

double Route::total_length_m() const noexcept {
  double total = 0.0;
  for (auto const& s : segments) {
    total += s.length_m;
  }
  return total;
}

double Route::total_duration_s() const noexcept {
  double total = 0.0;
  for (auto const& s : segments) {
    total += s.duration_s;
  }
  return total;
}

void validate(Route const& r) {
  for (auto const& s : r.segments) {
    validate(s);
  }
  if (r.segments.empty() && !(r.origin == r.destination)) {
    throw InvalidRoute("empty segment list for distinct endpoints");
  }
}

Route synthetic_route(GeoPoint const& origin, GeoPoint const& destination,
                      double speed_mps) {
  if (!(speed_mps > 0.0) || !std::isfinite(speed_mps)) {
    throw InvalidInput("speed_mps must be positive");
  }
  Route r{origin, destination, {}};
  auto const d = haversine(origin, destination);
  if (d > 0.0) {
    r.segments.push_back({d, d / speed_mps});
  }
  return r;
}

SyntheticRouter::SyntheticRouter(double speed_mps) : speed_mps_(speed_mps) {
  if (!(speed_mps > 0.0) || !std::isfinite(speed_mps)) {
    throw ConfigError("synthetic router speed_mps must be positive");
  }
}

Route SyntheticRouter::route(GeoPoint const& origin,
                             GeoPoint const& destination) const {
  return synthetic_route(origin, destination, speed_mps_);
}

// ---------------------------------------------------------------------------

std::vector<RouteSegment> parse_segments(json const& j) {
  if (!j.is_array()) {
    throw ConfigError("segments must be an array");
  }
  std::vector<RouteSegment> out;
  out.reserve(j.size());
  for (auto const& s : j) {
    if (!s.is_object() || !s.contains("length_m") || !s.contains("duration_s") ||
        !s["length_m"].is_number() || !s["duration_s"].is_number()) {
      throw ConfigError("segment must be {length_m, duration_s}");
    }
    RouteSegment seg{s["length_m"].get<double>(), s["duration_s"].get<double>()};
    try {
      validate(seg);
    } catch (InvalidRoute const& e) {
      throw ConfigError(e.what());
    }
    out.push_back(seg);
  }
  return out;
}

json to_json(Route const& r) {
  json segs = json::array();
  for (auto const& s : r.segments) {
    segs.push_back({{"length_m", s.length_m}, {"duration_s", s.duration_s}});
  }
  return {{"origin", {{"lat", r.origin.lat}, {"lng", r.origin.lng}}},
          {"destination", {{"lat", r.destination.lat}, {"lng", r.destination.lng}}},
          {"segments", std::move(segs)}};
}

FixtureRouter::Key FixtureRouter::key_of(GeoPoint const& o, GeoPoint const& d) {
  auto const q = [](double v) { return std::llround(v * 1e5); };
  return {q(o.lat), q(o.lng), q(d.lat), q(d.lng)};
}

void FixtureRouter::add(Route route) {
  validate(route);
  auto k = key_of(route.origin, route.destination);
  routes_.insert_or_assign(k, std::move(route));
}

std::vector<Route> FixtureRouter::routes() const {
  std::vector<Route> out;
  out.reserve(routes_.size());
  for (auto const& [k, r] : routes_) {
    out.push_back(r);
  }
  return out;
}

FixtureRouter FixtureRouter::from_json(json const& fixture) {
  if (!fixture.is_array()) {
    throw ConfigError("route fixture must be a JSON array");
  }
  FixtureRouter router;
  for (auto const& entry : fixture) {
    if (!entry.is_object() || !entry.contains("segments")) {
      throw ConfigError("route fixture entry needs origin, destination, segments");
    }
    Route r{point_from_json(entry.value("origin", json{}), "origin"),
            point_from_json(entry.value("destination", json{}), "destination"),
            parse_segments(entry["segments"])};
    try {
      router.add(std::move(r));
    } catch (InvalidRoute const& e) {
      throw ConfigError(std::string{"route fixture: "} + e.what());
    }
  }
  return router;
}

FixtureRouter FixtureRouter::from_file(std::string const& path) {
  std::ifstream in{path};
  if (!in) {
    throw ConfigError("cannot open route fixture '" + path + "'");
  }
  try {
    return from_json(json::parse(in));
  } catch (json::exception const& e) {
    throw ConfigError("route fixture '" + path + "': " + e.what());
  }
}

Route FixtureRouter::route(GeoPoint const& origin,
                           GeoPoint const& destination) const {
  auto const it = routes_.find(key_of(origin, destination));
  if (it != routes_.end()) {
    // Echo the caller's endpoints; the fixture matched them to 1e-5 deg.
    Route r = it->second;
    r.origin = origin;
    r.destination = destination;
    return r;
  }
  if (origin == destination) {
    return Route{origin, destination, {}};
  }
  throw RouteNotFound("no fixture route from (" + coord(origin.lat) + "," +
                      coord(origin.lng) + ") to (" + coord(destination.lat) +
                      "," + coord(destination.lng) + ")");
}

// ---------------------------------------------------------------------------

FallbackRouter::FallbackRouter(std::shared_ptr<RoutingProvider const> primary,
                               std::shared_ptr<RoutingProvider const> fallback)
    : primary_(std::move(primary)), fallback_(std::move(fallback)) {}

Route FallbackRouter::route(GeoPoint const& origin,
                            GeoPoint const& destination) const {
  try {
    return primary_->route(origin, destination);
  } catch (RouteNotFound const&) {
    return fallback_->route(origin, destination);
  }
}

// ---------------------------------------------------------------------------

HttpRouter::HttpRouter(std::string base_url, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  auto const scheme_end = base_url.find("://");
  auto const host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  auto const path_start = base_url.find('/', host_start);
  if (path_start == std::string::npos) {
    scheme_host_port_ = base_url;
  } else {
    scheme_host_port_ = base_url.substr(0, path_start);
    path_prefix_ = base_url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') {
      path_prefix_.pop_back();
    }
  }
  if (scheme_host_port_.empty()) {
    throw ConfigError("routing url must not be empty");
  }
}

Route HttpRouter::route(GeoPoint const& origin,
                        GeoPoint const& destination) const {
  if (origin == destination) {
    return Route{origin, destination, {}};
  }
  // httplib clients are not shareable across threads; one per request.
  httplib::Client client{scheme_host_port_};
  auto const secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  auto const usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  auto const path = path_prefix_ + "/route?olat=" + coord(origin.lat) +
                    "&olng=" + coord(origin.lng) + "&dlat=" + coord(destination.lat) +
                    "&dlng=" + coord(destination.lng);
  auto const res = client.Get(path);
  if (!res) {
    throw ProviderUnavailable("routing service unreachable: " +
                              httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ProviderUnavailable("routing service returned HTTP " +
                              std::to_string(res->status));
  }
  Route r{origin, destination, {}};
  try {
    auto const body = json::parse(res->body);
    r.segments = parse_segments(body.is_array() ? body : body.at("segments"));
  } catch (std::exception const& e) {
    throw ProviderUnavailable(std::string{"malformed routing response: "} +
                              e.what());
  }
  if (r.segments.empty()) {
    throw RouteNotFound("routing service found no path");
  }
  return r;
}

}  // namespace cabfare
