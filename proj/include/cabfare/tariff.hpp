#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cabfare/geo.hpp"
#include "cabfare/money.hpp"
#include "cabfare/time.hpp"

namespace cabfare {

/// How distance and time increments interact on the meter.
enum class MeterMode {
  /// A tick fires when either the distance or the time unit is consumed.
  whichever_first,
  /// Distance ticks only, except in segments slower than the threshold,
  /// where time ticks run as well (NYC-style "in traffic or stopped").
  distance_unless_slow,
};

std::string to_string(MeterMode m);

/// Tariff parameters for one time-of-day interval [start, end). An interval
/// with end <= start wraps past midnight; start == end covers the whole day.
struct RateWindow {
  std::string name;
  int start_minute = 0;
  int end_minute = 0;
  Money flag;
  Money increment;
  double distance_unit_m = 0.0;
  double time_unit_s = 0.0;

  bool contains(int minute_of_day) const noexcept;
  int length_minutes() const noexcept;
};

enum class ExtraTrigger { origin_zone, destination_zone, date_rule };

struct Zone {
  GeoPoint center;
  double radius_m = 0.0;
};

/// Calendar day an extra applies on; `year == 0` recurs every year.
struct DateRule {
  int year = 0;
  int month = 1;
  int day = 1;

  bool matches(CalendarDate const& d) const noexcept {
    return (year == 0 || year == d.year) && month == d.month && day == d.day;
  }
};

struct ExtraCharge {
  std::string name;
  ExtraTrigger trigger = ExtraTrigger::origin_zone;
  std::optional<Zone> zone;     // zone triggers
  std::vector<DateRule> dates;  // date-rule trigger
  Money amount;
};

struct TariffScheme {
  std::string name;
  std::string currency;
  std::vector<RateWindow> rate_windows;
  Money minimum_fare;
  MeterMode mode = MeterMode::whichever_first;
  std::optional<double> slow_speed_threshold_mps;
  std::vector<ExtraCharge> extras;
  double correction_coefficient = 1.0;
};

/// Enforces every scheme invariant, including that the rate windows
/// partition the day. Throws InvalidScheme naming the offending boundary.
void validate(TariffScheme const& scheme);

/// The unique window containing the local time of day.
RateWindow const& resolve_rate(TariffScheme const& scheme, int minute_of_day);
RateWindow const& resolve_rate(TariffScheme const& scheme, Timestamp const& at);

/// Loader for the tariff config schema; validates before returning.
/// Throws InvalidScheme.
TariffScheme tariff_from_json(nlohmann::json const& j);
TariffScheme load_tariff(std::string const& path);
nlohmann::json to_json(TariffScheme const& scheme);

}  // namespace cabfare
