#include "cabfare/meter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cabfare/error.hpp"

namespace cabfare {

namespace {

// Relative slack for "accumulator reached its unit" so that exact hits
// survive floating-point noise (e.g. 5 x 321.868 m == 1609.34 m).
constexpr double kTickSlack = 1e-9;

struct Accumulators {
  double distance_m = 0.0;
  double time_s = 0.0;
  std::int64_t ticks = 0;
};

// Quantity-domain walk used when only one accumulator advances (or when the
// segment is instantaneous). `available` is how much of the quantity the
// segment supplies, `acc` the carried accumulator, `unit` its tick size.
// Returns ticks fired; `acc` is left at the residual.
std::int64_t walk_single(double available, double& acc, double unit) {
  auto const need = unit - acc;
  if (available < need - kTickSlack * unit) {
    acc += available;
    return 0;
  }
  auto const rest = std::max(0.0, available - need);
  auto const more = static_cast<std::int64_t>(std::floor(rest / unit + kTickSlack));
  acc = std::max(0.0, rest - static_cast<double>(more) * unit);
  if (acc >= unit * (1.0 - kTickSlack)) {
    acc = 0.0;
  }
  return 1 + more;
}

void advance(Accumulators& a, RouteSegment const& seg, RateWindow const& w,
             MeterMode mode, double threshold) {
  auto const unit_d = w.distance_unit_m;
  auto const unit_t = w.time_unit_s;

  if (seg.duration_s == 0.0) {
    // Instantaneous hop: distance only.
    auto const n = walk_single(seg.length_m, a.distance_m, unit_d);
    if (n > 0) {
      a.time_s = 0.0;
    }
    a.ticks += n;
    return;
  }
  if (seg.length_m == 0.0) {
    // Stationary: time only.
    auto const n = walk_single(seg.duration_s, a.time_s, unit_t);
    if (n > 0) {
      a.distance_m = 0.0;
    }
    a.ticks += n;
    return;
  }

  auto const speed = seg.length_m / seg.duration_s;
  auto const time_active =
      mode == MeterMode::whichever_first || speed < threshold;

  if (!time_active) {
    auto const n = walk_single(seg.length_m, a.distance_m, unit_d);
    if (n > 0) {
      a.time_s = 0.0;
    }
    a.ticks += n;
    return;
  }

  // Both accumulators run: work in segment time. After the first tick the
  // state is reset, so later ticks are periodic.
  auto const to_distance = (unit_d - a.distance_m) / speed;
  auto const to_time = unit_t - a.time_s;
  auto const first = std::max(0.0, std::min(to_distance, to_time));
  auto const period = std::min(unit_d / speed, unit_t);
  auto const D = seg.duration_s;

  if (first > D + kTickSlack * std::max(period, D)) {
    a.distance_m += seg.length_m;
    a.time_s += D;
    return;
  }
  auto const rest = std::max(0.0, D - first);
  auto more = static_cast<std::int64_t>(std::floor(rest / period + kTickSlack));
  auto residual = std::max(0.0, rest - static_cast<double>(more) * period);
  if (residual >= period * (1.0 - kTickSlack)) {
    ++more;
    residual = 0.0;
  }
  a.ticks += 1 + more;
  a.time_s = residual;
  a.distance_m = residual * speed;
}

bool extra_matches(ExtraCharge const& e, JourneyContext const& ctx,
                   Timestamp const& start) {
  switch (e.trigger) {
    case ExtraTrigger::origin_zone:
      return e.zone && haversine(ctx.origin, e.zone->center) <= e.zone->radius_m;
    case ExtraTrigger::destination_zone:
      return e.zone &&
             haversine(ctx.destination, e.zone->center) <= e.zone->radius_m;
    case ExtraTrigger::date_rule:
      return std::any_of(begin(e.dates), end(e.dates),
                         [&](DateRule const& d) { return d.matches(start.date); });
  }
  return false;
}

}  // namespace

std::int64_t count_ticks(std::span<RouteSegment const> segments,
                         RateWindow const& window, MeterMode mode,
                         double slow_speed_threshold_mps) {
  Accumulators acc;
  for (auto const& seg : segments) {
    validate(seg);
    advance(acc, seg, window, mode, slow_speed_threshold_mps);
  }
  return acc.ticks;
}

MeterReading run_meter(Route const& route, TariffScheme const& scheme,
                       Timestamp const& start,
                       std::optional<JourneyContext> context) {
  validate(route);
  auto const& window = resolve_rate(scheme, start);
  auto const threshold = scheme.slow_speed_threshold_mps.value_or(0.0);

  MeterReading r;
  r.rate_window = window.name;
  r.ticks = count_ticks(route.segments, window, scheme.mode, threshold);
  r.metered = Money{window.flag.minor() + r.ticks * window.increment.minor(),
                    scheme.currency};
  r.clamped = std::max(r.metered, scheme.minimum_fare);
  r.extras = Money::zero(scheme.currency);

  auto const ctx = context.value_or(JourneyContext{route.origin, route.destination});
  for (auto const& e : scheme.extras) {
    if (extra_matches(e, ctx, start)) {
      r.extras += e.amount;
      r.applied_extras.push_back(e.name);
    }
  }
  return r;
}

Money simulate_meter(Route const& route, TariffScheme const& scheme,
                     Timestamp const& start,
                     std::optional<JourneyContext> context) {
  return run_meter(route, scheme, start, context).total();
}

Money apply_correction(Money const& fare, TariffScheme const& scheme) {
  // Coefficient applied in millionths so that half-way cases are exact.
  auto const micro = std::llround(scheme.correction_coefficient * 1e6);
  auto const scaled = div_round_half_away(fare.minor() * micro, 1'000'000);
  return std::max(Money{scaled, fare.currency()}, scheme.minimum_fare);
}

Money corrected_fare(MeterReading const& reading, TariffScheme const& scheme) {
  return apply_correction(reading.clamped, scheme) + reading.extras;
}

}  // namespace cabfare
