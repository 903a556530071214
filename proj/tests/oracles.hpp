#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. None of these call into the library's pricing code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cabfare/analysis.hpp"
#include "cabfare/historical.hpp"
#include "cabfare/routing.hpp"
#include "cabfare/tariff.hpp"

namespace oracle {

// --- meter: discrete-event stepping on an integer lattice --------------------
//
// Time advances in 0.01 s steps and distance in millimetres. Each route has
// one cruising speed V (mm per step); moving segments cover V mm per step,
// stopped segments 0, and instantaneous hops are walked 1 mm at a time. The
// distance unit is a multiple of V and the time unit a whole number of
// steps, so every tick lands exactly on a step boundary and the stepping is
// exact rather than approximate.

struct LatticeSegment {
  enum Kind { moving, stopped, hop } kind;
  std::int64_t steps = 0;  // moving / stopped
  std::int64_t mm = 0;     // hop
};

struct LatticeWindow {
  int start_minute;
  int end_minute;
  std::int64_t flag;
  std::int64_t increment;
  std::int64_t unit_mm;
  std::int64_t unit_steps;
};

struct LatticeCase {
  std::int64_t speed_mm = 0;  // per step
  std::vector<LatticeSegment> segments;
  std::vector<LatticeWindow> windows;
  bool nyc_mode = false;
  double threshold_mps = 0;  // nyc_mode only
  std::int64_t minimum = 0;
  int start_minute = 0;
};

inline bool window_contains(LatticeWindow const& w, int minute) {
  if (w.start_minute == w.end_minute) {
    return true;
  }
  if (w.start_minute < w.end_minute) {
    return minute >= w.start_minute && minute < w.end_minute;
  }
  return minute >= w.start_minute || minute < w.end_minute;
}

inline LatticeWindow const& pick_window(LatticeCase const& c) {
  for (auto const& w : c.windows) {
    if (window_contains(w, c.start_minute)) {
      return w;
    }
  }
  return c.windows.front();
}

inline std::int64_t lattice_ticks(LatticeCase const& c) {
  auto const& w = pick_window(c);
  // speed in m/s = speed_mm / 1000 / 0.01
  auto const speed_mps = static_cast<double>(c.speed_mm) / 10.0;
  std::int64_t dist = 0;
  std::int64_t time = 0;
  std::int64_t ticks = 0;
  auto const check = [&] {
    if (dist >= w.unit_mm || time >= w.unit_steps) {
      ++ticks;
      dist = 0;
      time = 0;
    }
  };
  for (auto const& s : c.segments) {
    switch (s.kind) {
      case LatticeSegment::hop:
        for (std::int64_t i = 0; i < s.mm; ++i) {
          ++dist;
          check();
        }
        break;
      case LatticeSegment::stopped:
        for (std::int64_t i = 0; i < s.steps; ++i) {
          ++time;
          check();
        }
        break;
      case LatticeSegment::moving: {
        auto const time_on = !c.nyc_mode || speed_mps < c.threshold_mps;
        for (std::int64_t i = 0; i < s.steps; ++i) {
          dist += c.speed_mm;
          if (time_on) {
            ++time;
          }
          check();
        }
        break;
      }
    }
  }
  return ticks;
}

inline std::int64_t lattice_fare(LatticeCase const& c) {
  auto const& w = pick_window(c);
  return std::max(w.flag + lattice_ticks(c) * w.increment, c.minimum);
}

/// round(0.9 * fare) with ties away from zero, then clamped; integer only.
inline std::int64_t corrected_point_nine(std::int64_t fare, std::int64_t minimum) {
  auto const scaled = (9 * fare + 5) / 10;
  return std::max(scaled, minimum);
}

inline cabfare::Route to_route(LatticeCase const& c) {
  cabfare::Route r;
  r.origin = {51.5, -0.12};
  r.destination = c.segments.empty() ? r.origin : cabfare::GeoPoint{51.51, -0.10};
  for (auto const& s : c.segments) {
    switch (s.kind) {
      case LatticeSegment::moving:
        r.segments.push_back({static_cast<double>(s.steps * c.speed_mm) / 1000.0,
                              static_cast<double>(s.steps) / 100.0});
        break;
      case LatticeSegment::stopped:
        r.segments.push_back({0.0, static_cast<double>(s.steps) / 100.0});
        break;
      case LatticeSegment::hop:
        r.segments.push_back({static_cast<double>(s.mm) / 1000.0, 0.0});
        break;
    }
  }
  return r;
}

inline cabfare::TariffScheme to_scheme(LatticeCase const& c, double coefficient = 1.0) {
  cabfare::TariffScheme s;
  s.name = "lattice";
  s.currency = "GBP";
  s.minimum_fare = {c.minimum, "GBP"};
  s.correction_coefficient = coefficient;
  s.mode = c.nyc_mode ? cabfare::MeterMode::distance_unless_slow
                      : cabfare::MeterMode::whichever_first;
  if (c.nyc_mode) {
    s.slow_speed_threshold_mps = c.threshold_mps;
  }
  int n = 0;
  for (auto const& w : c.windows) {
    cabfare::RateWindow rw;
    rw.name = "w" + std::to_string(++n);
    rw.start_minute = w.start_minute;
    rw.end_minute = w.end_minute;
    rw.flag = {w.flag, "GBP"};
    rw.increment = {w.increment, "GBP"};
    rw.distance_unit_m = static_cast<double>(w.unit_mm) / 1000.0;
    rw.time_unit_s = static_cast<double>(w.unit_steps) / 100.0;
    s.rate_windows.push_back(rw);
  }
  return s;
}

inline LatticeCase random_case(std::mt19937_64& rng) {
  auto const uni = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>{lo, hi}(rng);
  };
  LatticeCase c;
  c.speed_mm = uni(1, 15);  // 0.1 .. 1.5 m per step = 1 .. 15 m/s
  c.nyc_mode = uni(0, 1) == 1;
  c.threshold_mps = static_cast<double>(c.speed_mm) / 10.0 + (uni(0, 1) ? 1.7 : -0.45);
  if (c.threshold_mps <= 0) {
    c.threshold_mps = 0.05;
  }
  c.minimum = uni(0, 1) ? uni(100, 900) : 0;

  // 1..4 windows partitioning the day
  auto const n_windows = uni(1, 4);
  std::vector<int> cuts;
  while (static_cast<std::int64_t>(cuts.size()) < n_windows) {
    auto const m = static_cast<int>(uni(0, 1439));
    if (std::find(begin(cuts), end(cuts), m) == cuts.end()) {
      cuts.push_back(m);
    }
  }
  std::sort(begin(cuts), end(cuts));
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    LatticeWindow w;
    w.start_minute = cuts[i];
    w.end_minute = n_windows == 1 ? cuts[i] : cuts[(i + 1) % cuts.size()];
    w.flag = uni(0, 400);
    w.increment = uni(5, 60);
    w.unit_mm = c.speed_mm * uni(100, 3000);
    w.unit_steps = uni(500, 6000);
    c.windows.push_back(w);
  }
  c.start_minute = static_cast<int>(uni(0, 1439));

  // A third of the segments are whole multiples of a unit of the active
  // window, so ticks landing exactly on segment boundaries are common.
  auto const& w = pick_window(c);
  auto const steps_per_unit_d = w.unit_mm / c.speed_mm;
  auto const n_segments = uni(0, 8);
  for (std::int64_t i = 0; i < n_segments; ++i) {
    auto const exact = uni(0, 2) == 0;
    switch (uni(0, 5)) {
      case 0:
        c.segments.push_back(
            {LatticeSegment::stopped, exact ? w.unit_steps * uni(1, 4) : uni(1, 20000), 0});
        break;
      case 1:
        c.segments.push_back(
            {LatticeSegment::hop, 0, exact ? w.unit_mm * uni(1, 4) : c.speed_mm * uni(1, 20000)});
        break;
      default:
        c.segments.push_back(
            {LatticeSegment::moving, exact ? steps_per_unit_d * uni(1, 6) : uni(1, 60000), 0});
        break;
    }
  }
  return c;
}

// --- historical estimator -------------------------------------------------------

inline double great_circle(cabfare::GeoPoint a, cabfare::GeoPoint b) {
  constexpr double kR = 6371000.0;
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  auto const dlat = (b.lat - a.lat) * kDeg;
  auto const dlng = (b.lng - a.lng) * kDeg;
  auto const h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                 std::cos(a.lat * kDeg) * std::cos(b.lat * kDeg) * std::sin(dlng / 2) *
                     std::sin(dlng / 2);
  return 2 * kR * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Filter-and-mean over every trip; nullopt when nothing matches.
inline std::optional<std::int64_t> vicinity_mean(std::vector<cabfare::HistoricTrip> const& trips,
                                                 cabfare::GeoPoint o, cabfare::GeoPoint d,
                                                 double radius_m) {
  std::int64_t sum = 0;
  std::int64_t n = 0;
  for (auto const& t : trips) {
    if (great_circle(t.pickup, o) <= radius_m && great_circle(t.dropoff, d) <= radius_m) {
      sum += t.fare.minor();
      ++n;
    }
  }
  if (n == 0) {
    return std::nullopt;
  }
  // non-negative fares: half-up == half-away
  return (2 * sum + n) / (2 * n);
}

// --- statistics ---------------------------------------------------------------

struct Stats {
  double max_abs_diff, mean_diff, std_diff, max_pct_dev, mean_pct_dev, std_pct_dev, rho;
};

inline Stats direct_stats(std::vector<double> const& est, std::vector<double> const& act) {
  auto const n = static_cast<double>(est.size());
  std::vector<double> d(est.size());
  std::vector<double> p(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) {
    d[i] = act[i] - est[i];
    p[i] = std::fabs(d[i]) / act[i];
  }
  auto const mean = [&](std::vector<double> const& v) {
    return std::accumulate(begin(v), end(v), 0.0) / n;
  };
  auto const pstd = [&](std::vector<double> const& v) {
    auto const m = mean(v);
    double s = 0;
    for (auto x : v) {
      s += (x - m) * (x - m);
    }
    return std::sqrt(s / n);
  };
  Stats s{};
  for (std::size_t i = 0; i < d.size(); ++i) {
    s.max_abs_diff = std::max(s.max_abs_diff, std::fabs(d[i]));
    s.max_pct_dev = std::max(s.max_pct_dev, p[i]);
  }
  s.mean_diff = mean(d);
  s.std_diff = pstd(d);
  s.mean_pct_dev = mean(p);
  s.std_pct_dev = pstd(p);
  // Pearson from raw sums
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    sx += est[i];
    sy += act[i];
    sxx += est[i] * est[i];
    syy += act[i] * act[i];
    sxy += est[i] * act[i];
  }
  s.rho = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  return s;
}

/// True when |a - b| <= rel * max(|b|, 1e-12), with exact equality for zero.
inline bool close_rel(double a, double b, double rel) {
  if (a == b) {
    return true;
  }
  return std::fabs(a - b) <= rel * std::max(std::fabs(b), 1e-12);
}

}  // namespace oracle
