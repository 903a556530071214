#include "cabfare/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <tuple>

#include "cabfare/csv.hpp"
#include "cabfare/error.hpp"

namespace cabfare {

using nlohmann::json;

void validate(Trajectory const& t) {
  if (t.points.empty()) {
    throw InvalidInput("trajectory " + t.journey_id + "/" + t.provider + " has no points");
  }
  for (std::size_t i = 1; i < t.points.size(); ++i) {
    if (!(t.points[i].at.epoch_seconds() > t.points[i - 1].at.epoch_seconds())) {
      throw InvalidInput("trajectory " + t.journey_id + "/" + t.provider +
                         ": timestamps not strictly increasing at " +
                         t.points[i].at.text);
    }
  }
}

PlaceIndex::PlaceIndex(std::span<GeoPoint const> places, double cell_size_m)
    : index_(SpatialIndex::from_points(places, cell_size_m)) {}

// ---------------------------------------------------------------------------

namespace {

struct Moments {
  double mean = 0;
  double std = 0;
  double max = 0;
};

Moments moments(std::vector<double> const& v) {
  Moments m;
  for (auto x : v) {
    m.mean += x;
  }
  m.mean /= static_cast<double>(v.size());
  double ss = 0;
  for (auto x : v) {
    ss += (x - m.mean) * (x - m.mean);
  }
  m.std = std::sqrt(ss / static_cast<double>(v.size()));
  m.max = *std::max_element(begin(v), end(v));
  return m;
}

}  // namespace

AccuracyStats accuracy_stats(std::span<AccuracyPair const> pairs) {
  if (pairs.size() < 2) {
    throw InvalidInput("accuracy statistics need at least two pairs");
  }
  auto const& currency = pairs.front().actual.currency();
  std::vector<double> est;
  std::vector<double> act;
  std::vector<double> diff;
  std::vector<double> abs_diff;
  std::vector<double> pct;
  for (auto const& p : pairs) {
    if (p.actual.currency() != currency || p.estimated.currency() != currency) {
      throw CurrencyMismatch("accuracy pairs mix currencies");
    }
    if (p.actual.minor() <= 0) {
      throw ZeroActual("actual price must be positive");
    }
    auto const d = p.actual.major() - p.estimated.major();
    est.push_back(p.estimated.major());
    act.push_back(p.actual.major());
    diff.push_back(d);
    abs_diff.push_back(std::abs(d));
    pct.push_back(std::abs(d) / p.actual.major());
  }

  auto const e = moments(est);
  auto const a = moments(act);
  double sxy = 0;
  double sxx = 0;
  double syy = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    sxy += (est[i] - e.mean) * (act[i] - a.mean);
    sxx += (est[i] - e.mean) * (est[i] - e.mean);
    syy += (act[i] - a.mean) * (act[i] - a.mean);
  }
  if (sxx == 0 || syy == 0) {
    throw DegenerateSeries("correlation undefined for a constant price series");
  }

  auto const d = moments(diff);
  auto const q = moments(pct);
  AccuracyStats s;
  s.count = pairs.size();
  s.max_abs_diff = moments(abs_diff).max;
  s.mean_diff = d.mean;
  s.std_diff = d.std;
  s.max_pct_dev = q.max;
  s.mean_pct_dev = q.mean;
  s.std_pct_dev = q.std;
  s.pearson_rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return s;
}

double price_gain(Money const& price_flex, Money const& price_metered) {
  if (price_flex.currency() != price_metered.currency()) {
    throw CurrencyMismatch("price gain across currencies");
  }
  if (price_metered.minor() <= 0) {
    throw ZeroDenominator("metered price must be positive");
  }
  return static_cast<double>(price_flex.minor() - price_metered.minor()) /
         static_cast<double>(price_metered.minor());
}

double time_gain(double time_flex_s, double time_metered_s) {
  if (!(time_metered_s > 0)) {
    throw ZeroDenominator("metered journey time must be positive");
  }
  return (time_flex_s - time_metered_s) / time_metered_s;
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::win_a: return "win";
    case Outcome::win_b: return "loss";
    case Outcome::tie: return "tie";
  }
  return "?";
}

Outcome classify_outcome(ExperimentRide const& a, ExperimentRide const& b,
                         double tie_tolerance_s) {
  if (a.journey_id != b.journey_id) {
    throw MismatchedJourney("rides belong to journeys " + a.journey_id + " and " +
                            b.journey_id);
  }
  if (a.provider == b.provider) {
    throw MismatchedJourney("both rides of journey " + a.journey_id + " are " +
                            a.provider);
  }
  auto const da = a.duration_s();
  auto const db = b.duration_s();
  if (std::abs(da - db) <= tie_tolerance_s) {
    return Outcome::tie;
  }
  return da < db ? Outcome::win_a : Outcome::win_b;
}

double trip_density(std::span<GeoPoint const> points, PlaceIndex const& places,
                    double radius_m) {
  if (points.empty()) {
    throw EmptyTrajectory("trip density needs at least one point");
  }
  std::size_t total = 0;
  for (auto const& p : points) {
    total += places.count_within(p, radius_m);
  }
  auto const r_km = radius_m / 1000.0;
  return static_cast<double>(total) / static_cast<double>(points.size()) /
         (std::numbers::pi * r_km * r_km);
}

double trip_density(std::span<Trajectory const> trajectories, PlaceIndex const& places,
                    double radius_m) {
  std::vector<GeoPoint> points;
  for (auto const& t : trajectories) {
    for (auto const& p : t.points) {
      points.push_back(p.where);
    }
  }
  return trip_density(std::span<GeoPoint const>{points}, places, radius_m);
}

std::vector<DensityPoint> wins_fraction_by_density(std::span<JourneyDensity const> journeys) {
  std::vector<JourneyDensity> sorted{begin(journeys), end(journeys)};
  std::stable_sort(begin(sorted), end(sorted),
                   [](auto const& a, auto const& b) { return a.density < b.density; });
  std::vector<DensityPoint> curve;
  std::size_t wins = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    wins += sorted[i].outcome == Outcome::win_a ? 1 : 0;
    if (i + 1 == sorted.size() || sorted[i + 1].density != sorted[i].density) {
      curve.push_back({sorted[i].density,
                       static_cast<double>(wins) / static_cast<double>(i + 1)});
    }
  }
  return curve;
}

// ---------------------------------------------------------------------------

namespace {

double parse_double(std::string const& raw, char const* what, std::size_t line) {
  auto const s = trim_copy(raw);
  double v = 0;
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw InvalidInput("line " + std::to_string(line) + ": malformed " + what + " '" +
                       raw + "'");
  }
  return v;
}

template <typename Fn>
auto with_line(std::size_t line, Fn&& fn) {
  try {
    return fn();
  } catch (InvalidInput const& e) {
    throw InvalidInput("line " + std::to_string(line) + ": " + e.what());
  }
}

struct Table {
  CsvReader reader;
  std::optional<CsvHeader> header;
  std::vector<std::string> row;

  Table(std::istream& in, char const* what) : reader(in) {
    if (!reader.next(row)) {
      throw UnreadableSource(std::string{what} + " CSV is empty (header required)");
    }
    header.emplace(row);
  }

  bool next(std::size_t width) {
    if (!reader.next(row)) {
      return false;
    }
    if (row.size() < width) {
      throw InvalidInput("line " + std::to_string(reader.line()) + ": too few columns");
    }
    return true;
  }
};

}  // namespace

std::vector<ExperimentRide> load_rides(std::istream& in) {
  Table t{in, "rides"};
  auto const& h = *t.header;
  auto const c_journey = h.require("journey_id");
  auto const c_provider = h.require("provider");
  auto const c_start = h.require("start");
  auto const c_end = h.require("end");
  auto const c_actual = h.require("actual_price");
  auto const c_est = h.require("estimated_price");
  auto const c_currency = h.require("currency");
  auto const width =
      1 + std::max({c_journey, c_provider, c_start, c_end, c_actual, c_est, c_currency});

  std::vector<ExperimentRide> rides;
  while (t.next(width)) {
    auto const line = t.reader.line();
    ExperimentRide r;
    r.journey_id = trim_copy(t.row[c_journey]);
    r.provider = trim_copy(t.row[c_provider]);
    if (r.journey_id.empty() || r.provider.empty()) {
      throw InvalidInput("line " + std::to_string(line) + ": empty journey_id or provider");
    }
    auto const currency = trim_copy(t.row[c_currency]);
    with_line(line, [&] {
      r.start = parse_rfc3339(trim_copy(t.row[c_start]));
      r.end = parse_rfc3339(trim_copy(t.row[c_end]));
      r.actual_price = Money::parse_major(trim_copy(t.row[c_actual]), currency);
      r.estimated_price = Money::parse_major(trim_copy(t.row[c_est]), currency);
      return 0;
    });
    if (!(r.duration_s() > 0)) {
      throw InvalidInput("line " + std::to_string(line) + ": ride ends before it starts");
    }
    if (r.actual_price.minor() < 0 || r.estimated_price.minor() < 0) {
      throw InvalidInput("line " + std::to_string(line) + ": negative price");
    }
    r.trajectory.journey_id = r.journey_id;
    r.trajectory.provider = r.provider;
    rides.push_back(std::move(r));
  }
  return rides;
}

std::vector<Trajectory> load_trajectories(std::istream& in) {
  Table t{in, "trajectory"};
  auto const& h = *t.header;
  auto const c_journey = h.require("journey_id");
  auto const c_provider = h.require("provider");
  auto const c_time = h.require("timestamp");
  auto const c_lat = h.require("lat");
  auto const c_lng = h.require("lng");
  auto const width = 1 + std::max({c_journey, c_provider, c_time, c_lat, c_lng});

  std::map<std::pair<std::string, std::string>, Trajectory> tracks;
  while (t.next(width)) {
    auto const line = t.reader.line();
    auto const journey = trim_copy(t.row[c_journey]);
    auto const provider = trim_copy(t.row[c_provider]);
    GeoPoint const p{parse_double(t.row[c_lat], "lat", line),
                     parse_double(t.row[c_lng], "lng", line)};
    with_line(line, [&] {
      validate(p);
      return 0;
    });
    auto const at = with_line(line, [&] { return parse_rfc3339(trim_copy(t.row[c_time])); });
    auto& track = tracks[{journey, provider}];
    track.journey_id = journey;
    track.provider = provider;
    track.points.push_back({p, at});
  }

  std::vector<Trajectory> out;
  for (auto& [key, track] : tracks) {
    std::stable_sort(begin(track.points), end(track.points), [](auto const& a, auto const& b) {
      return a.at.epoch_seconds() < b.at.epoch_seconds();
    });
    validate(track);
    out.push_back(std::move(track));
  }
  return out;
}

std::vector<GeoPoint> load_places(std::istream& in) {
  Table t{in, "places"};
  auto const& h = *t.header;
  auto const c_lat = h.require("lat");
  auto const c_lng = h.require("lng");
  auto const width = 1 + std::max(c_lat, c_lng);
  std::vector<GeoPoint> places;
  while (t.next(width)) {
    auto const line = t.reader.line();
    GeoPoint const p{parse_double(t.row[c_lat], "lat", line),
                     parse_double(t.row[c_lng], "lng", line)};
    with_line(line, [&] {
      validate(p);
      return 0;
    });
    places.push_back(p);
  }
  return places;
}

// ---------------------------------------------------------------------------

ExperimentReport analyze_experiment(std::vector<ExperimentRide> rides,
                                    std::span<Trajectory const> trajectories,
                                    PlaceIndex const& places,
                                    AnalysisOptions const& options) {
  if (options.metered_provider == options.flex_provider) {
    throw InvalidInput("metered and flex provider must differ");
  }
  std::map<std::pair<std::string, std::string>, Trajectory const*> track_of;
  for (auto const& t : trajectories) {
    track_of[{t.journey_id, t.provider}] = &t;
  }

  // journey -> (metered, flex)
  std::map<std::string, std::pair<ExperimentRide*, ExperimentRide*>> journeys;
  std::map<std::string, std::vector<AccuracyPair>> pairs;
  for (auto& r : rides) {
    if (auto const it = track_of.find({r.journey_id, r.provider}); it != track_of.end()) {
      r.trajectory = *it->second;
    }
    pairs[r.provider].push_back({r.estimated_price, r.actual_price});
    if (r.provider != options.metered_provider && r.provider != options.flex_provider) {
      throw InvalidInput("journey " + r.journey_id + " has unexpected provider '" +
                         r.provider + "'");
    }
    auto& slot = journeys[r.journey_id];
    auto*& target = r.provider == options.metered_provider ? slot.first : slot.second;
    if (target != nullptr) {
      throw InvalidInput("journey " + r.journey_id + " has two " + r.provider + " rides");
    }
    target = &r;
  }

  ExperimentReport report;
  report.options = options;
  std::vector<JourneyDensity> densities;
  double metered_total_s = 0;
  double flex_total_s = 0;
  for (auto const& [id, slot] : journeys) {
    auto const* m = slot.first;
    auto const* f = slot.second;
    if (m == nullptr || f == nullptr) {
      throw InvalidInput("journey " + id + " lacks a " +
                         (m == nullptr ? options.metered_provider : options.flex_provider) +
                         " ride");
    }
    std::vector<Trajectory> both;
    for (auto const* r : {m, f}) {
      if (!r->trajectory.points.empty()) {
        both.push_back(r->trajectory);
      }
    }
    if (both.empty()) {
      throw EmptyTrajectory("journey " + id + " has no trajectory points");
    }
    JourneyAnalysis j{id,
                      classify_outcome(*m, *f, options.tie_tolerance_s),
                      m->duration_s(),
                      f->duration_s(),
                      price_gain(f->actual_price, m->actual_price),
                      time_gain(f->duration_s(), m->duration_s()),
                      trip_density(std::span<Trajectory const>{both}, places,
                                   options.density_radius_m)};
    switch (j.outcome) {
      case Outcome::win_a: ++report.wins; break;
      case Outcome::win_b: ++report.losses; break;
      case Outcome::tie: ++report.ties; break;
    }
    metered_total_s += j.metered_duration_s;
    flex_total_s += j.flex_duration_s;
    densities.push_back({j.outcome, j.density});
    report.journeys.push_back(std::move(j));
  }
  if (report.journeys.empty()) {
    throw InvalidInput("experiment contains no journeys");
  }
  auto const n = static_cast<double>(report.journeys.size());
  report.mean_metered_min = metered_total_s / n / 60.0;
  report.mean_flex_min = flex_total_s / n / 60.0;
  report.density_curve = wins_fraction_by_density(densities);

  for (auto const& [provider, ps] : pairs) {
    ProviderAccuracy acc;
    try {
      acc.stats = accuracy_stats(ps);
    } catch (Error const& e) {
      acc.error = e.kind() + ": " + e.what();
    }
    report.accuracy.emplace(provider, std::move(acc));
  }
  return report;
}

ExperimentReport analyze_experiment_files(std::string const& rides_path,
                                          std::string const& trajectories_path,
                                          std::string const& places_path,
                                          AnalysisOptions const& options) {
  auto const open = [](std::string const& path, char const* what) {
    std::ifstream in{path};
    if (!in) {
      throw UnreadableSource(std::string{"cannot open "} + what + " file '" + path + "'");
    }
    return in;
  };
  auto const scoped = [](std::string const& path, auto&& fn) {
    try {
      return fn();
    } catch (InvalidInput const& e) {
      throw InvalidInput(path + ": " + e.what());
    }
  };
  auto rides_in = open(rides_path, "rides");
  auto tracks_in = open(trajectories_path, "trajectories");
  auto places_in = open(places_path, "places");
  auto rides = scoped(rides_path, [&] { return load_rides(rides_in); });
  auto const tracks = scoped(trajectories_path, [&] { return load_trajectories(tracks_in); });
  auto const place_points = scoped(places_path, [&] { return load_places(places_in); });
  PlaceIndex const places{place_points};
  return analyze_experiment(std::move(rides), tracks, places, options);
}

json to_json(AccuracyStats const& s) {
  return {{"count", s.count},
          {"max_abs_diff", s.max_abs_diff},
          {"mean_diff", s.mean_diff},
          {"std_diff", s.std_diff},
          {"max_pct_dev", s.max_pct_dev},
          {"mean_pct_dev", s.mean_pct_dev},
          {"std_pct_dev", s.std_pct_dev},
          {"pearson_rho", s.pearson_rho}};
}

json to_json(ExperimentReport const& r) {
  json accuracy = json::object();
  for (auto const& [provider, a] : r.accuracy) {
    accuracy[provider] = a.stats ? to_json(*a.stats) : json{{"error", a.error}};
  }
  json gains = json::array();
  json journeys = json::array();
  for (auto const& j : r.journeys) {
    gains.push_back(
        {{"journey_id", j.journey_id}, {"price_gain", j.price_gain}, {"time_gain", j.time_gain}});
    journeys.push_back({{"journey_id", j.journey_id},
                        {"outcome", to_string(j.outcome)},
                        {"metered_duration_s", j.metered_duration_s},
                        {"flex_duration_s", j.flex_duration_s},
                        {"trip_density", j.density}});
  }
  json curve = json::array();
  for (auto const& p : r.density_curve) {
    curve.push_back({{"density", p.density}, {"fraction", p.fraction}});
  }
  return {{"metered_provider", r.options.metered_provider},
          {"flex_provider", r.options.flex_provider},
          {"tie_tolerance_s", r.options.tie_tolerance_s},
          {"density_radius_m", r.options.density_radius_m},
          {"accuracy", std::move(accuracy)},
          {"gains", std::move(gains)},
          {"outcomes", {{"wins", r.wins}, {"ties", r.ties}, {"losses", r.losses}}},
          {"mean_duration_min",
           {{"metered", r.mean_metered_min}, {"flex", r.mean_flex_min}}},
          {"journeys", std::move(journeys)},
          {"density_curve", std::move(curve)}};
}

}  // namespace cabfare
