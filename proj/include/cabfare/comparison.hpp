#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "cabfare/flex.hpp"
#include "cabfare/historical.hpp"
#include "cabfare/meter.hpp"
#include "cabfare/money.hpp"
#include "cabfare/routing.hpp"
#include "cabfare/tariff.hpp"
#include "cabfare/time.hpp"

namespace cabfare {

class QueryLog;

enum class EstimateMethod { meter, historical, flex };

std::string to_string(EstimateMethod m);
EstimateMethod parse_method(std::string const& s);

struct JourneyQuery {
  std::string id;
  std::string user_id;
  std::string city;
  GeoPoint origin;
  GeoPoint destination;
  Timestamp submitted_at;
  std::optional<GeoPoint> gps_sample;
  /// Overrides the city's configured surge for flex providers.
  std::optional<double> surge_multiplier;
};

/// Deterministic id derived from the query's content (FNV-1a, hex).
std::string make_query_id(JourneyQuery const& q);

struct PriceEstimate {
  std::string provider;
  Money amount;
  EstimateMethod method = EstimateMethod::meter;
  bool corrected = false;
  double surge_multiplier = 1.0;
};

struct ComparisonResult {
  std::string query_id;
  std::vector<PriceEstimate> estimates;
  std::string winner;
  Money savings;
};

/// A source of one provider's fare for a routed journey.
class PriceProvider {
 public:
  virtual ~PriceProvider() = default;
  virtual std::string const& id() const noexcept = 0;
  virtual PriceEstimate estimate(JourneyQuery const& query, Route const& route) const = 0;
};

/// Metered taxi: meter simulation with correction, optionally preceded by
/// the historic vicinity estimator (falls back to the meter when no trip
/// matches).
class MeteredProvider final : public PriceProvider {
 public:
  MeteredProvider(std::string id, TariffScheme scheme,
                  std::shared_ptr<TripStore const> history = nullptr,
                  double vicinity_m = kDefaultVicinityM);

  std::string const& id() const noexcept override { return id_; }
  TariffScheme const& scheme() const noexcept { return scheme_; }
  PriceEstimate estimate(JourneyQuery const& query, Route const& route) const override;

 private:
  std::string id_;
  TariffScheme scheme_;
  std::shared_ptr<TripStore const> history_;
  double vicinity_m_;
};

/// Flex-priced provider from a base/per-minute/per-mile model.
class FlexProvider final : public PriceProvider {
 public:
  FlexProvider(std::string id, FlexPricingModel model, SurgeState default_surge = {});

  std::string const& id() const noexcept override { return id_; }
  FlexPricingModel const& model() const noexcept { return model_; }
  PriceEstimate estimate(JourneyQuery const& query, Route const& route) const override;

 private:
  std::string id_;
  FlexPricingModel model_;
  SurgeState default_surge_;
};

/// Flex provider backed by recorded [min, max] quotes per origin/destination
/// (keyed at 5 decimal places), collapsed with mean_of_range. An unknown
/// pair raises ProviderUnavailable.
class RangeQuoteProvider final : public PriceProvider {
 public:
  struct Quote {
    GeoPoint origin;
    GeoPoint destination;
    Money min_price;
    Money max_price;
    double surge_multiplier = 1.0;
  };

  RangeQuoteProvider(std::string id, std::string currency, std::vector<Quote> quotes);
  static RangeQuoteProvider from_file(std::string id, std::string currency,
                                      std::string const& path);

  std::string const& id() const noexcept override { return id_; }
  PriceEstimate estimate(JourneyQuery const& query, Route const& route) const override;

 private:
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t>;
  std::string id_;
  std::string currency_;
  std::map<Key, Quote> quotes_;
};

/// Estimator wiring for one city.
struct CityPricing {
  std::string city;
  std::string currency;
  std::shared_ptr<RoutingProvider const> router;
  std::vector<std::shared_ptr<PriceProvider const>> providers;
};

struct ProviderFailure {
  std::string provider;
  std::string kind;
  std::string message;
};

struct ComparisonOutcome {
  ComparisonResult result;
  Route route;
  std::vector<ProviderFailure> failures;

  /// At least one provider failed; such outcomes are never persisted.
  bool partial() const noexcept { return !failures.empty(); }
};

/// Winner = cheapest provider, ties broken by lexicographically smallest
/// provider id; savings = max - min. Requires >= 1 estimate.
void settle(ComparisonResult& result);

/// Routes the query once, prices it with every provider, picks the winner.
/// Routing errors (RouteNotFound, ProviderUnavailable) propagate and nothing
/// is persisted. A provider failure yields a partial outcome that is not
/// persisted. Otherwise the result is appended to `log` when given.
ComparisonOutcome compare(JourneyQuery const& query, CityPricing const& city,
                          QueryLog* log = nullptr);

nlohmann::json to_json(PriceEstimate const& e);
PriceEstimate price_estimate_from_json(nlohmann::json const& j);

/// Response body shared by the HTTP service and the CLI.
nlohmann::json to_json(ComparisonResult const& r, JourneyQuery const& q);

}  // namespace cabfare
