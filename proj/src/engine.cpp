#include "cabfare/engine.hpp"

#include <cmath>

namespace cabfare {

using nlohmann::json;

namespace {

GeoPoint point_field(json const& body, char const* key) {
  if (!body.contains(key) || !body[key].is_object()) {
    throw InvalidInput(std::string{"'"} + key + "' must be an object {lat, lng}");
  }
  auto const& p = body[key];
  if (!p.contains("lat") || !p.contains("lng") || !p["lat"].is_number() ||
      !p["lng"].is_number()) {
    throw InvalidInput(std::string{"'"} + key + "' needs numeric lat and lng");
  }
  GeoPoint const g{p["lat"].get<double>(), p["lng"].get<double>()};
  try {
    validate(g);
  } catch (InvalidInput const& e) {
    throw InvalidInput(std::string{key} + ": " + e.what());
  }
  return g;
}

std::optional<std::string> opt_string(json const& body, char const* key) {
  if (!body.contains(key) || body[key].is_null()) {
    return std::nullopt;
  }
  if (!body[key].is_string()) {
    throw InvalidInput(std::string{"'"} + key + "' must be a string");
  }
  return body[key].get<std::string>();
}

json money_json(Money const& m) { return m.to_string(); }

}  // namespace

std::filesystem::path feedback_path_for(std::filesystem::path const& log_path) {
  auto p = log_path;
  p.replace_filename(log_path.stem().string() + ".feedback.ndjson");
  return p;
}

Engine::Engine(Config config, EngineOptions options)
    : config_(std::move(config)), options_(std::move(options)) {
  if (options_.log_path) {
    queries_ = std::make_unique<QueryLog>(*options_.log_path);
    feedback_ = std::make_unique<FeedbackLog>(feedback_path_for(*options_.log_path));
  } else {
    queries_ = std::make_unique<QueryLog>();
    feedback_ = std::make_unique<FeedbackLog>();
  }
}

JourneyQuery Engine::parse_estimate_request(json const& body) const {
  if (!body.is_object()) {
    throw InvalidInput("request body must be a JSON object");
  }
  auto const city = opt_string(body, "city");
  if (!city || city->empty()) {
    throw InvalidInput("'city' is required");
  }
  config_.city(*city);

  JourneyQuery q;
  q.city = *city;
  q.origin = point_field(body, "origin");
  q.destination = point_field(body, "destination");
  q.user_id = opt_string(body, "user_id").value_or("");
  auto const time = opt_string(body, "time");
  q.submitted_at = time ? parse_rfc3339(*time) : options_.clock();
  if (body.contains("surge_multiplier") && !body["surge_multiplier"].is_null()) {
    if (!body["surge_multiplier"].is_number()) {
      throw InvalidInput("'surge_multiplier' must be a number");
    }
    q.surge_multiplier = SurgeState{body["surge_multiplier"].get<double>()}.multiplier();
  }
  q.id = make_query_id(q);
  return q;
}

json Engine::estimate(json const& body) {
  auto const query = parse_estimate_request(body);
  auto const& city = config_.city(query.city);
  auto const outcome = compare(query, city.pricing, queries_.get());
  if (outcome.partial()) {
    std::string msg = "provider estimate failed:";
    for (auto const& f : outcome.failures) {
      msg += " " + f.provider + " (" + f.kind + ": " + f.message + ")";
    }
    throw ProviderUnavailable(msg);
  }
  return to_json(outcome.result, query);
}

json Engine::geocode(std::string const& city, std::string const& query) const {
  auto const& c = config_.city(city);
  json out = json::array();
  for (auto const& e : c.gazetteer.search(query)) {
    out.push_back({{"name", e.name}, {"lat", e.location.lat}, {"lng", e.location.lng}});
  }
  return out;
}

json Engine::cities() const {
  json out = json::array();
  for (auto const& c : config_.cities()) {
    json providers = json::array();
    for (auto const* p : {&c.metered, &c.flex}) {
      providers.push_back({{"id", p->id},
                           {"name", p->name},
                           {"short_name", p->short_name},
                           {"color", p->color},
                           {"kind", to_string(p->kind)}});
    }
    out.push_back({{"code", c.code},
                   {"name", c.name},
                   {"currency", c.currency},
                   {"providers", std::move(providers)}});
  }
  return out;
}

json Engine::submit_feedback(json const& body) {
  if (!body.is_object()) {
    throw InvalidInput("request body must be a JSON object");
  }
  FeedbackInput in;
  in.text = opt_string(body, "text").value_or("");
  in.user_id = opt_string(body, "user_id").value_or("");
  in.query_id = opt_string(body, "query_id");
  in.provider = opt_string(body, "provider");

  auto currency = opt_string(body, "currency");
  if (in.query_id) {
    if (auto const q = queries_->find(*in.query_id)) {
      currency = q->savings.currency();
    }
  }
  if (body.contains("actual_fare") && !body["actual_fare"].is_null()) {
    if (!currency) {
      throw InvalidInput("'currency' is required for an actual fare without a known query");
    }
    auto const& v = body["actual_fare"];
    if (v.is_string()) {
      in.actual_fare = Money::parse_major(v.get<std::string>(), *currency);
    } else if (v.is_number()) {
      in.actual_fare = Money{round_half_away(v.get<double>() * 100.0), *currency};
    } else {
      throw InvalidInput("'actual_fare' must be a decimal string or number");
    }
    if (in.actual_fare->minor() < 0) {
      throw InvalidInput("'actual_fare' must be >= 0");
    }
  }
  return to_json(record_feedback(*feedback_, *queries_, in, options_.clock()));
}

json Engine::feedback() const {
  json out = json::array();
  for (auto const& r : feedback_->records()) {
    out.push_back(to_json(r));
  }
  return out;
}

json Engine::savings(std::string const& city, std::string const& from,
                     std::string const& to) const {
  auto const& c = config_.city(city);
  std::optional<Timestamp> lo;
  std::optional<Timestamp> hi;
  if (!from.empty()) {
    lo = parse_rfc3339(from);
  }
  if (!to.empty()) {
    hi = parse_rfc3339(to);
  }
  auto const s = savings_summary(queries_->records(), c.code, c.currency, lo, hi);
  return {{"city", c.code},
          {"query_count", s.query_count},
          {"mean_savings", money_json(s.mean_savings)},
          {"mean_savings_minor", s.mean_savings.minor()},
          {"total_savings", money_json(s.total_savings)},
          {"total_savings_minor", s.total_savings.minor()},
          {"currency", c.currency}};
}

// ---------------------------------------------------------------------------

json error_body(Error const& e) { return {{"error", e.kind()}, {"message", e.what()}}; }

int http_status(Error const& e) {
  if (dynamic_cast<UnknownCity const*>(&e)) {
    return 404;
  }
  if (dynamic_cast<RouteNotFound const*>(&e)) {
    return 422;
  }
  // a malformed route is an upstream defect
  if (dynamic_cast<ProviderUnavailable const*>(&e) || dynamic_cast<InvalidRoute const*>(&e)) {
    return 502;
  }
  if (dynamic_cast<StorageFailure const*>(&e) || dynamic_cast<ConfigError const*>(&e) ||
      dynamic_cast<InvalidScheme const*>(&e)) {
    return 500;
  }
  return 400;
}

int exit_code(Error const& e) {
  if (dynamic_cast<ConfigError const*>(&e) || dynamic_cast<InvalidScheme const*>(&e) ||
      dynamic_cast<StorageFailure const*>(&e) || dynamic_cast<UnreadableSource const*>(&e)) {
    return 1;
  }
  if (dynamic_cast<RouteNotFound const*>(&e) ||
      dynamic_cast<ProviderUnavailable const*>(&e) || dynamic_cast<InvalidRoute const*>(&e)) {
    return 2;
  }
  return 3;
}

}  // namespace cabfare
