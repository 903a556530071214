#pragma once

#include <string>

#include <json.hpp>

#include "cabfare/money.hpp"
#include "cabfare/routing.hpp"

namespace cabfare {

inline constexpr double kMetersPerMile = 1609.34;

/// Base + per-minute + per-mile pricing with a minimum fare (Uber X style).
struct FlexPricingModel {
  std::string name;
  std::string currency;
  Money base_fare;
  Money per_minute;
  Money per_mile;
  Money minimum_fare;
};

void validate(FlexPricingModel const& model);

/// Demand multiplier applied to the flex total; always >= 1.
class SurgeState {
 public:
  SurgeState() = default;
  /// Throws InvalidInput if multiplier < 1 or not finite.
  explicit SurgeState(double multiplier);

  double multiplier() const noexcept { return multiplier_; }

 private:
  double multiplier_ = 1.0;
};

/// max(surge * (base + per_minute * minutes + per_mile * miles), minimum),
/// rounded half away from zero to minor units.
Money estimate_flex(Route const& route, FlexPricingModel const& model,
                    SurgeState const& surge = SurgeState{});

/// Collapses a provider's [min, max] quote to its mean in whole currency
/// units, ties rounding up. Throws RangeInverted / CurrencyMismatch.
Money mean_of_range(Money const& min_price, Money const& max_price);

FlexPricingModel flex_model_from_json(nlohmann::json const& j);
FlexPricingModel load_flex_model(std::string const& path);

}  // namespace cabfare
