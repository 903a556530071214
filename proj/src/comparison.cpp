#include "cabfare/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "cabfare/error.hpp"
#include "cabfare/query_log.hpp"

namespace cabfare {

using nlohmann::json;

std::string to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::meter: return "meter";
    case EstimateMethod::historical: return "historical";
    case EstimateMethod::flex: return "flex";
  }
  return "?";
}

EstimateMethod parse_method(std::string const& s) {
  if (s == "meter") {
    return EstimateMethod::meter;
  }
  if (s == "historical") {
    return EstimateMethod::historical;
  }
  if (s == "flex") {
    return EstimateMethod::flex;
  }
  throw InvalidInput("unknown estimate method '" + s + "'");
}

std::string make_query_id(JourneyQuery const& q) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.7f|%.7f|%.7f|%.7f|%.6f|", q.origin.lat,
                q.origin.lng, q.destination.lat, q.destination.lng,
                q.surge_multiplier.value_or(0.0));
  auto const canonical =
      q.city + "|" + buf + q.submitted_at.text + "|" + q.user_id;
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char out[24];
  std::snprintf(out, sizeof out, "q-%016llx", static_cast<unsigned long long>(h));
  return out;
}

// ---------------------------------------------------------------------------

MeteredProvider::MeteredProvider(std::string id, TariffScheme scheme,
                                 std::shared_ptr<TripStore const> history,
                                 double vicinity_m)
    : id_(std::move(id)),
      scheme_(std::move(scheme)),
      history_(std::move(history)),
      vicinity_m_(vicinity_m) {
  validate(scheme_);
  if (history_ && history_->currency() != scheme_.currency) {
    throw ConfigError("historic trips for '" + id_ + "' are not in " + scheme_.currency);
  }
}

PriceEstimate MeteredProvider::estimate(JourneyQuery const& query,
                                        Route const& route) const {
  if (history_) {
    try {
      return {id_, estimate_historical(*history_, query.origin, query.destination,
                                       vicinity_m_),
              EstimateMethod::historical, false, 1.0};
    } catch (NoDataInVicinity const&) {
      // fall through to the meter
    }
  }
  auto const reading = run_meter(route, scheme_, query.submitted_at,
                                 JourneyContext{query.origin, query.destination});
  return {id_, corrected_fare(reading, scheme_), EstimateMethod::meter,
          scheme_.correction_coefficient != 1.0, 1.0};
}

FlexProvider::FlexProvider(std::string id, FlexPricingModel model,
                           SurgeState default_surge)
    : id_(std::move(id)), model_(std::move(model)), default_surge_(default_surge) {
  validate(model_);
}

PriceEstimate FlexProvider::estimate(JourneyQuery const& query,
                                     Route const& route) const {
  auto const surge = query.surge_multiplier ? SurgeState{*query.surge_multiplier}
                                            : default_surge_;
  return {id_, estimate_flex(route, model_, surge), EstimateMethod::flex, false,
          surge.multiplier()};
}

namespace {

std::int64_t q5(double v) { return std::llround(v * 1e5); }

}  // namespace

RangeQuoteProvider::RangeQuoteProvider(std::string id, std::string currency,
                                       std::vector<Quote> quotes)
    : id_(std::move(id)), currency_(std::move(currency)) {
  for (auto& q : quotes) {
    if (q.min_price.currency() != currency_ || q.max_price.currency() != currency_) {
      throw ConfigError("quote for '" + id_ + "' not in " + currency_);
    }
    if (q.min_price.minor() > q.max_price.minor()) {
      throw ConfigError("quote for '" + id_ + "' has min > max");
    }
    if (!(q.surge_multiplier >= 1.0)) {
      throw ConfigError("quote for '" + id_ + "' has surge < 1");
    }
    Key const k{q5(q.origin.lat), q5(q.origin.lng), q5(q.destination.lat),
                q5(q.destination.lng)};
    quotes_.insert_or_assign(k, q);
  }
}

RangeQuoteProvider RangeQuoteProvider::from_file(std::string id, std::string currency,
                                                 std::string const& path) {
  std::ifstream in{path};
  if (!in) {
    throw ConfigError("cannot open quote fixture '" + path + "'");
  }
  std::vector<Quote> quotes;
  try {
    auto const j = json::parse(in);
    for (auto const& e : j) {
      quotes.push_back({{e.at("origin").at("lat").get<double>(),
                         e.at("origin").at("lng").get<double>()},
                        {e.at("destination").at("lat").get<double>(),
                         e.at("destination").at("lng").get<double>()},
                        {e.at("min_minor").get<std::int64_t>(), currency},
                        {e.at("max_minor").get<std::int64_t>(), currency},
                        e.value("surge_multiplier", 1.0)});
    }
  } catch (json::exception const& e) {
    throw ConfigError("quote fixture '" + path + "': " + e.what());
  }
  return RangeQuoteProvider{std::move(id), std::move(currency), std::move(quotes)};
}

PriceEstimate RangeQuoteProvider::estimate(JourneyQuery const& query,
                                           Route const&) const {
  auto const it = quotes_.find(Key{q5(query.origin.lat), q5(query.origin.lng),
                                   q5(query.destination.lat),
                                   q5(query.destination.lng)});
  if (it == quotes_.end()) {
    throw ProviderUnavailable("no price quote recorded for this journey");
  }
  auto const& q = it->second;
  return {id_, mean_of_range(q.min_price, q.max_price), EstimateMethod::flex, false,
          q.surge_multiplier};
}

// ---------------------------------------------------------------------------

void settle(ComparisonResult& r) {
  if (r.estimates.empty()) {
    throw InvalidInput("cannot settle a comparison without estimates");
  }
  auto const cheaper = [](PriceEstimate const& a, PriceEstimate const& b) {
    if (a.amount.minor() != b.amount.minor()) {
      return a.amount.minor() < b.amount.minor();
    }
    return a.provider < b.provider;
  };
  auto const& win = *std::min_element(begin(r.estimates), end(r.estimates), cheaper);
  auto const& most = *std::max_element(
      begin(r.estimates), end(r.estimates),
      [](auto const& a, auto const& b) { return a.amount.minor() < b.amount.minor(); });
  r.winner = win.provider;
  r.savings = most.amount - win.amount;
}

ComparisonOutcome compare(JourneyQuery const& query, CityPricing const& city,
                          QueryLog* log) {
  if (city.providers.size() < 2) {
    throw ConfigError("city '" + city.city + "' needs at least two providers");
  }
  validate(query.origin);
  validate(query.destination);

  ComparisonOutcome out;
  out.route = city.router->route(query.origin, query.destination);
  validate(out.route);

  out.result.query_id = query.id.empty() ? make_query_id(query) : query.id;
  for (auto const& provider : city.providers) {
    try {
      out.result.estimates.push_back(provider->estimate(query, out.route));
    } catch (Error const& e) {
      out.failures.push_back({provider->id(), e.kind(), e.what()});
    }
  }
  out.result.savings = Money::zero(city.currency);
  if (!out.result.estimates.empty()) {
    settle(out.result);
  }
  if (log != nullptr && !out.partial()) {
    log->append(QueryRecord::from(query, out.result));
  }
  return out;
}

// ---------------------------------------------------------------------------

json to_json(PriceEstimate const& e) {
  return {{"provider", e.provider},
          {"amount", e.amount.to_string()},
          {"amount_minor", e.amount.minor()},
          {"currency", e.amount.currency()},
          {"method", to_string(e.method)},
          {"corrected", e.corrected},
          {"surge_multiplier", e.surge_multiplier}};
}

PriceEstimate price_estimate_from_json(json const& j) {
  return {j.at("provider").get<std::string>(),
          {j.at("amount_minor").get<std::int64_t>(), j.at("currency").get<std::string>()},
          parse_method(j.at("method").get<std::string>()),
          j.value("corrected", false),
          j.value("surge_multiplier", 1.0)};
}

json to_json(ComparisonResult const& r, JourneyQuery const& q) {
  json estimates = json::array();
  for (auto const& e : r.estimates) {
    estimates.push_back(to_json(e));
  }
  return {{"query_id", r.query_id},
          {"city", q.city},
          {"submitted_at", q.submitted_at.text},
          {"estimates", std::move(estimates)},
          {"winner", r.winner},
          {"savings", r.savings.to_string()},
          {"savings_minor", r.savings.minor()},
          {"currency", r.savings.currency()}};
}

}  // namespace cabfare
