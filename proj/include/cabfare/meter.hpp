#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cabfare/money.hpp"
#include "cabfare/routing.hpp"
#include "cabfare/tariff.hpp"
#include "cabfare/time.hpp"

namespace cabfare {

/// Query endpoints used for zone-triggered extras. Defaults to the route's.
struct JourneyContext {
  GeoPoint origin;
  GeoPoint destination;
};

/// Full breakdown of one meter run.
struct MeterReading {
  std::string rate_window;
  std::int64_t ticks = 0;
  Money metered;  // flag + ticks * increment
  Money clamped;  // max(metered, minimum_fare)
  Money extras;   // sum of matched extras
  std::vector<std::string> applied_extras;

  /// clamped + extras: the uncorrected meter fare.
  Money total() const { return clamped + extras; }
};

/// Counts increments along the segments under one rate window.
///
/// Motion inside a segment is uniform. Distance and time accumulators carry
/// across segments and both reset whenever a tick fires; a tick fires as
/// soon as an active accumulator reaches its unit. Zero-duration segments
/// only advance distance, zero-length segments only advance time. In
/// distance_unless_slow mode the time accumulator is active only in
/// segments whose mean speed is below `slow_speed_threshold_mps`.
std::int64_t count_ticks(std::span<RouteSegment const> segments,
                         RateWindow const& window, MeterMode mode,
                         double slow_speed_threshold_mps = 0.0);

/// Prices the whole route at the rate window containing `start`.
/// Throws InvalidRoute.
MeterReading run_meter(Route const& route, TariffScheme const& scheme,
                       Timestamp const& start,
                       std::optional<JourneyContext> context = std::nullopt);

/// max(flag + ticks * increment, minimum) + matched extras.
Money simulate_meter(Route const& route, TariffScheme const& scheme,
                     Timestamp const& start,
                     std::optional<JourneyContext> context = std::nullopt);

/// max(round(fare * correction_coefficient), minimum_fare), rounding half
/// away from zero in minor units.
Money apply_correction(Money const& fare, TariffScheme const& scheme);

/// The displayed metered estimate: corrected meter total plus extras,
/// which are never scaled by the correction coefficient.
Money corrected_fare(MeterReading const& reading, TariffScheme const& scheme);

}  // namespace cabfare
