#include "cabfare/flex.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "cabfare/error.hpp"

namespace cabfare {

using nlohmann::json;

void validate(FlexPricingModel const& m) {
  for (auto const* money : {&m.base_fare, &m.per_minute, &m.per_mile, &m.minimum_fare}) {
    if (money->minor() < 0 || money->currency() != m.currency) {
      throw ConfigError("flex model '" + m.name +
                        "': components must be >= 0 in " + m.currency);
    }
  }
}

SurgeState::SurgeState(double multiplier) : multiplier_(multiplier) {
  if (!std::isfinite(multiplier) || multiplier < 1.0) {
    throw InvalidInput("surge multiplier must be >= 1.0");
  }
}

Money estimate_flex(Route const& route, FlexPricingModel const& model,
                    SurgeState const& surge) {
  validate(route);
  auto const minutes = route.total_duration_s() / 60.0;
  auto const miles = route.total_length_m() / kMetersPerMile;
  auto const raw = static_cast<double>(model.base_fare.minor()) +
                   static_cast<double>(model.per_minute.minor()) * minutes +
                   static_cast<double>(model.per_mile.minor()) * miles;
  Money const fare{round_half_away(surge.multiplier() * raw), model.currency};
  return std::max(fare, model.minimum_fare);
}

Money mean_of_range(Money const& min_price, Money const& max_price) {
  if (min_price.currency() != max_price.currency()) {
    throw CurrencyMismatch("range currencies differ: " + min_price.currency() +
                           " vs " + max_price.currency());
  }
  if (min_price.minor() > max_price.minor()) {
    throw RangeInverted("price range inverted: " + min_price.to_string() + " > " +
                        max_price.to_string());
  }
  // floor((min + max) / 2 / 100 + 1/2) in whole units, exact in integers.
  auto const sum = min_price.minor() + max_price.minor();
  auto const num = sum + 100;
  auto whole = num / 200;
  if (num % 200 != 0 && num < 0) {
    --whole;
  }
  return {whole * 100, min_price.currency()};
}

FlexPricingModel flex_model_from_json(json const& j) {
  auto const field = [&](char const* name) -> std::int64_t {
    if (!j.contains(name) || !j[name].is_number_integer()) {
      throw ConfigError(std::string{"flex model: missing integer field '"} + name + "'");
    }
    return j[name].get<std::int64_t>();
  };
  if (!j.is_object() || !j.contains("name") || !j.contains("currency")) {
    throw ConfigError("flex model needs name and currency");
  }
  FlexPricingModel m;
  m.name = j["name"].get<std::string>();
  m.currency = j["currency"].get<std::string>();
  m.base_fare = {field("base_fare_minor"), m.currency};
  m.per_minute = {field("per_minute_minor"), m.currency};
  m.per_mile = {field("per_mile_minor"), m.currency};
  m.minimum_fare = {field("minimum_fare_minor"), m.currency};
  validate(m);
  return m;
}

FlexPricingModel load_flex_model(std::string const& path) {
  std::ifstream in{path};
  if (!in) {
    throw ConfigError("cannot open flex model '" + path + "'");
  }
  try {
    return flex_model_from_json(json::parse(in));
  } catch (json::exception const& e) {
    throw ConfigError("flex model '" + path + "': " + e.what());
  }
}

}  // namespace cabfare
