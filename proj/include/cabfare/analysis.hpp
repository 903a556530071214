#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cabfare/geo.hpp"
#include "cabfare/money.hpp"
#include "cabfare/time.hpp"

namespace cabfare {

struct TrackPoint {
  GeoPoint where;
  Timestamp at;
};

struct Trajectory {
  std::string journey_id;
  std::string provider;
  std::vector<TrackPoint> points;
};

/// Throws InvalidInput unless the track is non-empty with strictly
/// increasing timestamps.
void validate(Trajectory const& t);

struct ExperimentRide {
  std::string journey_id;
  std::string provider;
  Timestamp start;
  Timestamp end;
  Money actual_price;
  Money estimated_price;
  Trajectory trajectory;

  double duration_s() const noexcept { return end.epoch_seconds() - start.epoch_seconds(); }
};

/// Immutable spatial index over place locations.
class PlaceIndex {
 public:
  explicit PlaceIndex(std::span<GeoPoint const> places, double cell_size_m = 200.0);

  std::size_t count_within(GeoPoint const& p, double radius_m) const {
    return index_.count_within(p, radius_m);
  }
  std::size_t size() const noexcept { return index_.size(); }

 private:
  SpatialIndex index_;
};

struct AccuracyPair {
  Money estimated;
  Money actual;
};

/// Differences are actual - estimated in major units; percentage deviations
/// are |diff| / actual as fractions. Standard deviations are population.
struct AccuracyStats {
  std::size_t count = 0;
  double max_abs_diff = 0;
  double mean_diff = 0;
  double std_diff = 0;
  double max_pct_dev = 0;
  double mean_pct_dev = 0;
  double std_pct_dev = 0;
  double pearson_rho = 0;
};

/// Throws InvalidInput (< 2 pairs), CurrencyMismatch, ZeroActual or
/// DegenerateSeries.
AccuracyStats accuracy_stats(std::span<AccuracyPair const> pairs);

/// (flex - metered) / metered. Throws ZeroDenominator.
double price_gain(Money const& price_flex, Money const& price_metered);
double time_gain(double time_flex_s, double time_metered_s);

/// Relative to the first ride: win_a means ride_a was faster.
enum class Outcome { win_a, win_b, tie };

std::string to_string(Outcome o);

inline constexpr double kDefaultTieToleranceS = 60.0;
inline constexpr double kDefaultDensityRadiusM = 200.0;

/// Throws MismatchedJourney for different journeys or the same provider.
Outcome classify_outcome(ExperimentRide const& a, ExperimentRide const& b,
                         double tie_tolerance_s = kDefaultTieToleranceS);

/// Mean places within `radius_m` of each point, per km² of disc area.
/// Throws EmptyTrajectory when there are no points.
double trip_density(std::span<GeoPoint const> points, PlaceIndex const& places,
                    double radius_m = kDefaultDensityRadiusM);
double trip_density(std::span<Trajectory const> trajectories, PlaceIndex const& places,
                    double radius_m = kDefaultDensityRadiusM);

struct DensityPoint {
  double density = 0;
  double fraction = 0;
};

struct JourneyDensity {
  Outcome outcome;  // win_a is a win for the metered provider
  double density;
};

/// Cumulative metered win fraction at each distinct density, ascending.
std::vector<DensityPoint> wins_fraction_by_density(std::span<JourneyDensity const> journeys);

// --- experiment pipeline ---------------------------------------------------

/// Rides CSV: journey_id,provider,start,end,actual_price,estimated_price,currency.
std::vector<ExperimentRide> load_rides(std::istream& in);
/// Trajectory CSV: journey_id,provider,timestamp,lat,lng. Points are sorted
/// by time within each (journey, provider) track.
std::vector<Trajectory> load_trajectories(std::istream& in);
/// Places CSV: name,lat,lng.
std::vector<GeoPoint> load_places(std::istream& in);

struct AnalysisOptions {
  std::string metered_provider = "black_cab";
  std::string flex_provider = "uber_x";
  double tie_tolerance_s = kDefaultTieToleranceS;
  double density_radius_m = kDefaultDensityRadiusM;
};

struct JourneyAnalysis {
  std::string journey_id;
  Outcome outcome;
  double metered_duration_s;
  double flex_duration_s;
  double price_gain;
  double time_gain;
  double density;
};

struct ProviderAccuracy {
  std::optional<AccuracyStats> stats;
  std::string error;  // set when stats could not be computed
};

struct ExperimentReport {
  AnalysisOptions options;
  std::vector<JourneyAnalysis> journeys;  // ordered by journey_id
  std::map<std::string, ProviderAccuracy> accuracy;
  std::size_t wins = 0;
  std::size_t ties = 0;
  std::size_t losses = 0;
  double mean_metered_min = 0;
  double mean_flex_min = 0;
  std::vector<DensityPoint> density_curve;
};

/// Pairs each journey's metered and flex rides and runs every formula.
/// Trajectories are attached to rides by (journey_id, provider). Throws
/// InvalidInput for journeys lacking either ride, or EmptyTrajectory.
ExperimentReport analyze_experiment(std::vector<ExperimentRide> rides,
                                    std::span<Trajectory const> trajectories,
                                    PlaceIndex const& places,
                                    AnalysisOptions const& options = {});

/// File front end. Throws UnreadableSource naming a missing file.
ExperimentReport analyze_experiment_files(std::string const& rides_path,
                                          std::string const& trajectories_path,
                                          std::string const& places_path,
                                          AnalysisOptions const& options = {});

nlohmann::json to_json(AccuracyStats const& s);
nlohmann::json to_json(ExperimentReport const& r);

}  // namespace cabfare
