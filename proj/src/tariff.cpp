#include "cabfare/tariff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "cabfare/error.hpp"

namespace cabfare {

using nlohmann::json;

namespace {

constexpr int kMinutesPerDay = 1440;

std::string label(RateWindow const& w) {
  return "'" + w.name + "' [" + format_hhmm(w.start_minute % kMinutesPerDay) +
         ", " + format_hhmm(w.end_minute % kMinutesPerDay) + ")";
}

Money money_field(json const& j, char const* field, std::string const& currency) {
  if (!j.contains(field) || !j[field].is_number_integer()) {
    throw InvalidScheme(std::string{"missing integer field '"} + field + "'");
  }
  return {j[field].get<std::int64_t>(), currency};
}

std::string string_field(json const& j, char const* field) {
  if (!j.contains(field) || !j[field].is_string()) {
    throw InvalidScheme(std::string{"missing string field '"} + field + "'");
  }
  return j[field].get<std::string>();
}

double number_field(json const& j, char const* field) {
  if (!j.contains(field) || !j[field].is_number()) {
    throw InvalidScheme(std::string{"missing numeric field '"} + field + "'");
  }
  return j[field].get<double>();
}

DateRule parse_date_rule(std::string const& s) {
  DateRule r;
  int y = 0;
  int m = 0;
  int d = 0;
  char tail = 0;
  if (s.size() == 10 && std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &tail) == 3) {
    auto const cd = parse_date(s);
    return {cd.year, cd.month, cd.day};
  }
  if (s.size() == 5 && std::sscanf(s.c_str(), "%2d-%2d%c", &m, &d, &tail) == 2 &&
      m >= 1 && m <= 12 && d >= 1 && d <= 31) {
    r.month = m;
    r.day = d;
    return r;
  }
  throw InvalidScheme("malformed extra date '" + s + "': expected YYYY-MM-DD or MM-DD");
}

std::string format_date_rule(DateRule const& r) {
  char buf[16];
  if (r.year == 0) {
    std::snprintf(buf, sizeof buf, "%02d-%02d", r.month, r.day);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", r.year, r.month, r.day);
  }
  return buf;
}

ExtraTrigger parse_trigger(std::string const& s) {
  if (s == "origin-zone") {
    return ExtraTrigger::origin_zone;
  }
  if (s == "destination-zone") {
    return ExtraTrigger::destination_zone;
  }
  if (s == "date-rule") {
    return ExtraTrigger::date_rule;
  }
  throw InvalidScheme("unknown extra trigger '" + s + "'");
}

char const* trigger_name(ExtraTrigger t) {
  switch (t) {
    case ExtraTrigger::origin_zone: return "origin-zone";
    case ExtraTrigger::destination_zone: return "destination-zone";
    case ExtraTrigger::date_rule: return "date-rule";
  }
  return "?";
}

}  // namespace

std::string to_string(MeterMode m) {
  return m == MeterMode::whichever_first ? "whichever_first"
                                         : "distance_unless_slow";
}

int RateWindow::length_minutes() const noexcept {
  auto const len = ((end_minute - start_minute) % kMinutesPerDay + kMinutesPerDay) %
                   kMinutesPerDay;
  return len == 0 ? kMinutesPerDay : len;
}

bool RateWindow::contains(int minute_of_day) const noexcept {
  auto const offset =
      ((minute_of_day - start_minute) % kMinutesPerDay + kMinutesPerDay) %
      kMinutesPerDay;
  return offset < length_minutes();
}

void validate(TariffScheme const& s) {
  if (s.currency.empty()) {
    throw InvalidScheme("tariff '" + s.name + "': currency required");
  }
  if (s.rate_windows.empty()) {
    throw InvalidScheme("tariff '" + s.name + "': at least one rate window required");
  }
  if (s.minimum_fare.minor() < 0 || s.minimum_fare.currency() != s.currency) {
    throw InvalidScheme("tariff '" + s.name + "': minimum_fare must be >= 0 in " +
                        s.currency);
  }
  if (!(s.correction_coefficient > 0.0 && s.correction_coefficient <= 2.0)) {
    throw InvalidScheme("tariff '" + s.name +
                        "': correction_coefficient must be in (0, 2]");
  }
  auto const needs_threshold = s.mode == MeterMode::distance_unless_slow;
  if (needs_threshold != s.slow_speed_threshold_mps.has_value()) {
    throw InvalidScheme("tariff '" + s.name +
                        "': slow_speed_threshold_mps required iff mode is "
                        "distance_unless_slow");
  }
  if (s.slow_speed_threshold_mps && !(*s.slow_speed_threshold_mps > 0.0)) {
    throw InvalidScheme("tariff '" + s.name + "': slow_speed_threshold_mps must be > 0");
  }

  for (auto const& w : s.rate_windows) {
    if (w.start_minute < 0 || w.start_minute > kMinutesPerDay || w.end_minute < 0 ||
        w.end_minute > kMinutesPerDay) {
      throw InvalidScheme("rate window " + label(w) + ": boundary outside the day");
    }
    if (w.flag.currency() != s.currency || w.increment.currency() != s.currency ||
        w.flag.minor() < 0 || w.increment.minor() < 0) {
      throw InvalidScheme("rate window " + label(w) + ": charges must be >= 0 in " +
                          s.currency);
    }
    if (!(w.distance_unit_m > 0.0) || !std::isfinite(w.distance_unit_m) ||
        !(w.time_unit_s > 0.0) || !std::isfinite(w.time_unit_s)) {
      throw InvalidScheme("rate window " + label(w) + ": units must be > 0");
    }
  }

  // Partition check: sorted by start, each window must end where the next
  // one (cyclically) begins and the lengths must sum to a full day.
  std::vector<RateWindow const*> sorted;
  for (auto const& w : s.rate_windows) {
    sorted.push_back(&w);
  }
  std::sort(begin(sorted), end(sorted), [](auto const* a, auto const* b) {
    return a->start_minute % kMinutesPerDay < b->start_minute % kMinutesPerDay;
  });
  if (sorted.size() == 1) {
    if (sorted.front()->length_minutes() != kMinutesPerDay) {
      auto const& w = *sorted.front();
      throw InvalidScheme("rate windows leave a gap between " +
                          format_hhmm(w.end_minute % kMinutesPerDay) + " and " +
                          format_hhmm(w.start_minute % kMinutesPerDay));
    }
    return;
  }
  int total = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    auto const& cur = *sorted[i];
    auto const& next = *sorted[(i + 1) % sorted.size()];
    auto const cur_start = cur.start_minute % kMinutesPerDay;
    auto const next_start = next.start_minute % kMinutesPerDay;
    if (i + 1 < sorted.size() && cur_start == next_start) {
      throw InvalidScheme("rate windows " + label(cur) + " and " + label(next) +
                          " overlap at " + format_hhmm(cur_start));
    }
    auto const cur_end = cur.end_minute % kMinutesPerDay;
    if (cur_end != next_start) {
      // Does `cur` run past the start of `next`?
      auto const gap_to_next =
          ((next_start - cur_start) % kMinutesPerDay + kMinutesPerDay) % kMinutesPerDay;
      auto const gap = gap_to_next == 0 ? kMinutesPerDay : gap_to_next;
      if (cur.length_minutes() > gap) {
        throw InvalidScheme("rate windows " + label(cur) + " and " + label(next) +
                            " overlap at " + format_hhmm(next_start));
      }
      throw InvalidScheme("rate windows leave a gap between " + format_hhmm(cur_end) +
                          " and " + format_hhmm(next_start));
    }
    total += cur.length_minutes();
  }
  if (total != kMinutesPerDay) {
    throw InvalidScheme("rate windows overlap: total coverage " +
                        std::to_string(total) + " minutes");
  }

  for (auto const& e : s.extras) {
    if (e.amount.minor() < 0 || e.amount.currency() != s.currency) {
      throw InvalidScheme("extra '" + e.name + "': amount must be >= 0 in " + s.currency);
    }
    if (e.trigger == ExtraTrigger::date_rule) {
      if (e.dates.empty()) {
        throw InvalidScheme("extra '" + e.name + "': date-rule needs dates");
      }
    } else if (!e.zone || !(e.zone->radius_m > 0.0) || !is_valid(e.zone->center)) {
      throw InvalidScheme("extra '" + e.name + "': zone needs a valid center and radius_m > 0");
    }
  }
}

RateWindow const& resolve_rate(TariffScheme const& scheme, int minute_of_day) {
  auto const m = ((minute_of_day % kMinutesPerDay) + kMinutesPerDay) % kMinutesPerDay;
  for (auto const& w : scheme.rate_windows) {
    if (w.contains(m)) {
      return w;
    }
  }
  throw InvalidScheme("tariff '" + scheme.name + "': no rate window covers " +
                      format_hhmm(m));
}

RateWindow const& resolve_rate(TariffScheme const& scheme, Timestamp const& at) {
  return resolve_rate(scheme, at.minute_of_day());
}

TariffScheme tariff_from_json(json const& j) {
  if (!j.is_object()) {
    throw InvalidScheme("tariff config must be a JSON object");
  }
  TariffScheme s;
  s.name = string_field(j, "name");
  s.currency = string_field(j, "currency");
  auto const mode = string_field(j, "mode");
  if (mode == "whichever_first") {
    s.mode = MeterMode::whichever_first;
  } else if (mode == "distance_unless_slow") {
    s.mode = MeterMode::distance_unless_slow;
  } else {
    throw InvalidScheme("unknown meter mode '" + mode + "'");
  }
  if (j.contains("slow_speed_threshold_mps") && !j["slow_speed_threshold_mps"].is_null()) {
    s.slow_speed_threshold_mps = number_field(j, "slow_speed_threshold_mps");
  }
  s.minimum_fare = money_field(j, "minimum_fare_minor", s.currency);
  if (j.contains("correction_coefficient")) {
    s.correction_coefficient = number_field(j, "correction_coefficient");
  }
  if (!j.contains("rate_windows") || !j["rate_windows"].is_array()) {
    throw InvalidScheme("missing array 'rate_windows'");
  }
  for (auto const& wj : j["rate_windows"]) {
    RateWindow w;
    w.start_minute = parse_hhmm(string_field(wj, "start"));
    w.end_minute = parse_hhmm(string_field(wj, "end"));
    w.name = wj.value("name", string_field(wj, "start") + "-" + string_field(wj, "end"));
    w.flag = money_field(wj, "flag_minor", s.currency);
    w.increment = money_field(wj, "increment_minor", s.currency);
    w.distance_unit_m = number_field(wj, "distance_unit_m");
    w.time_unit_s = number_field(wj, "time_unit_s");
    s.rate_windows.push_back(std::move(w));
  }
  if (j.contains("extras")) {
    for (auto const& ej : j["extras"]) {
      ExtraCharge e;
      e.name = string_field(ej, "name");
      e.trigger = parse_trigger(string_field(ej, "trigger"));
      e.amount = money_field(ej, "amount_minor", s.currency);
      if (ej.contains("zone")) {
        auto const& z = ej["zone"];
        e.zone = Zone{{number_field(z, "lat"), number_field(z, "lng")},
                      number_field(z, "radius_m")};
      }
      if (ej.contains("dates")) {
        for (auto const& d : ej["dates"]) {
          if (!d.is_string()) {
            throw InvalidScheme("extra '" + e.name + "': dates must be strings");
          }
          e.dates.push_back(parse_date_rule(d.get<std::string>()));
        }
      }
      s.extras.push_back(std::move(e));
    }
  }
  try {
    validate(s);
  } catch (InvalidInput const& e) {
    throw InvalidScheme(e.what());
  }
  return s;
}

TariffScheme load_tariff(std::string const& path) {
  std::ifstream in{path};
  if (!in) {
    throw InvalidScheme("cannot open tariff '" + path + "'");
  }
  try {
    return tariff_from_json(json::parse(in));
  } catch (json::exception const& e) {
    throw InvalidScheme("tariff '" + path + "': " + e.what());
  } catch (InvalidInput const& e) {
    throw InvalidScheme("tariff '" + path + "': " + e.what());
  } catch (InvalidScheme const& e) {
    throw InvalidScheme("tariff '" + path + "': " + e.what());
  }
}

json to_json(TariffScheme const& s) {
  json windows = json::array();
  for (auto const& w : s.rate_windows) {
    windows.push_back({{"name", w.name},
                       {"start", format_hhmm(w.start_minute % kMinutesPerDay)},
                       {"end", format_hhmm(w.end_minute % kMinutesPerDay)},
                       {"flag_minor", w.flag.minor()},
                       {"increment_minor", w.increment.minor()},
                       {"distance_unit_m", w.distance_unit_m},
                       {"time_unit_s", w.time_unit_s}});
  }
  json extras = json::array();
  for (auto const& e : s.extras) {
    json ej{{"name", e.name},
            {"trigger", trigger_name(e.trigger)},
            {"amount_minor", e.amount.minor()}};
    if (e.zone) {
      ej["zone"] = {{"lat", e.zone->center.lat},
                    {"lng", e.zone->center.lng},
                    {"radius_m", e.zone->radius_m}};
    }
    if (!e.dates.empty()) {
      json dates = json::array();
      for (auto const& d : e.dates) {
        dates.push_back(format_date_rule(d));
      }
      ej["dates"] = std::move(dates);
    }
    extras.push_back(std::move(ej));
  }
  json j{{"name", s.name},
         {"currency", s.currency},
         {"mode", to_string(s.mode)},
         {"minimum_fare_minor", s.minimum_fare.minor()},
         {"correction_coefficient", s.correction_coefficient},
         {"rate_windows", std::move(windows)},
         {"extras", std::move(extras)}};
  if (s.slow_speed_threshold_mps) {
    j["slow_speed_threshold_mps"] = *s.slow_speed_threshold_mps;
  }
  return j;
}

}  // namespace cabfare
