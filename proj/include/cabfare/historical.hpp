#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cabfare/geo.hpp"
#include "cabfare/money.hpp"
#include "cabfare/time.hpp"

namespace cabfare {

inline constexpr double kDefaultVicinityM = 100.0;

struct HistoricTrip {
  GeoPoint pickup;
  GeoPoint dropoff;
  Money fare;
  std::optional<Timestamp> timestamp;
};

/// Immutable trip collection with pickup and dropoff grid indexes.
class TripStore {
 public:
  TripStore(std::vector<HistoricTrip> trips, std::string currency,
            double cell_size_m = kDefaultVicinityM);

  std::vector<HistoricTrip> const& trips() const noexcept { return trips_; }
  std::size_t size() const noexcept { return trips_.size(); }
  bool empty() const noexcept { return trips_.empty(); }
  std::string const& currency() const noexcept { return currency_; }

  /// Ids of trips with pickup within `radius_m` of origin AND dropoff
  /// within `radius_m` of destination, ascending.
  std::vector<std::size_t> matching(GeoPoint const& origin,
                                    GeoPoint const& destination,
                                    double radius_m) const;

  SpatialIndex const& pickup_index() const noexcept { return pickup_index_; }
  SpatialIndex const& dropoff_index() const noexcept { return dropoff_index_; }

 private:
  std::vector<HistoricTrip> trips_;
  std::string currency_;
  SpatialIndex pickup_index_;
  SpatialIndex dropoff_index_;
};

struct RejectedRow {
  std::size_t line = 0;
  std::string reason;
};

struct IngestResult {
  TripStore store;
  std::vector<RejectedRow> rejected;

  std::size_t accepted() const noexcept { return store.size(); }
};

/// Reads a trip CSV (header required; see README for columns). Bad rows
/// are collected in `rejected`. Throws UnreadableSource for a missing
/// header, EmptyDataset when no row is accepted.
IngestResult ingest_trips(std::istream& source, std::string const& currency);
IngestResult ingest_trips_file(std::string const& path, std::string const& currency);

/// Mean fare of the trips matching both endpoints, rounded half away from
/// zero to minor units. Throws NoDataInVicinity when nothing matches.
Money estimate_historical(TripStore const& store, GeoPoint const& origin,
                          GeoPoint const& destination,
                          double radius_m = kDefaultVicinityM);

/// Writes trips back out in the ingest column layout.
void write_trips_csv(std::ostream& out, std::span<HistoricTrip const> trips);

}  // namespace cabfare
