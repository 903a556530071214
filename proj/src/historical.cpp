#include "cabfare/historical.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>

#include "cabfare/csv.hpp"
#include "cabfare/error.hpp"

namespace cabfare {

namespace {

std::vector<SpatialIndex::Entry> entries_of(std::vector<HistoricTrip> const& trips,
                                            bool pickup) {
  std::vector<SpatialIndex::Entry> out;
  out.reserve(trips.size());
  for (std::size_t i = 0; i < trips.size(); ++i) {
    out.push_back({pickup ? trips[i].pickup : trips[i].dropoff, i});
  }
  return out;
}

std::optional<double> parse_number(std::string const& raw) {
  auto const s = trim_copy(raw);
  if (s.empty()) {
    return std::nullopt;
  }
  double v = 0.0;
  auto const* first = s.data();
  if (*first == '+') {
    ++first;
  }
  auto const [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

TripStore::TripStore(std::vector<HistoricTrip> trips, std::string currency,
                     double cell_size_m)
    : trips_(std::move(trips)),
      currency_(std::move(currency)),
      pickup_index_(entries_of(trips_, true), cell_size_m),
      dropoff_index_(entries_of(trips_, false), cell_size_m) {
  for (auto const& t : trips_) {
    if (t.fare.minor() < 0 || t.fare.currency() != currency_) {
      throw InvalidInput("historic trip fare must be >= 0 in " + currency_);
    }
  }
}

std::vector<std::size_t> TripStore::matching(GeoPoint const& origin,
                                             GeoPoint const& destination,
                                             double radius_m) const {
  auto const near_pickup = pickup_index_.radius_query(origin, radius_m);
  if (near_pickup.empty()) {
    return {};
  }
  auto const near_dropoff = dropoff_index_.radius_query(destination, radius_m);
  std::vector<std::size_t> both;
  std::set_intersection(begin(near_pickup), end(near_pickup), begin(near_dropoff),
                        end(near_dropoff), std::back_inserter(both));
  return both;
}

IngestResult ingest_trips(std::istream& source, std::string const& currency) {
  CsvReader reader{source};
  std::vector<std::string> row;
  if (!source || !reader.next(row)) {
    throw UnreadableSource("trip CSV is empty or unreadable (header required)");
  }
  std::optional<CsvHeader> header;
  std::size_t c_time = 0;
  std::size_t c_plat = 0;
  std::size_t c_plng = 0;
  std::size_t c_dlat = 0;
  std::size_t c_dlng = 0;
  std::size_t c_fare = 0;
  try {
    header.emplace(row);
    c_time = header->require("pickup_datetime");
    c_plat = header->require("pickup_lat");
    c_plng = header->require("pickup_lng");
    c_dlat = header->require("dropoff_lat");
    c_dlng = header->require("dropoff_lng");
    c_fare = header->require("fare_amount");
  } catch (InvalidInput const& e) {
    throw UnreadableSource(std::string{"trip CSV header: "} + e.what());
  }
  auto const width =
      1 + std::max({c_time, c_plat, c_plng, c_dlat, c_dlng, c_fare});

  std::vector<HistoricTrip> trips;
  std::vector<RejectedRow> rejected;
  while (reader.next(row)) {
    auto const reject = [&](std::string reason) {
      rejected.push_back({reader.line(), std::move(reason)});
    };
    if (row.size() < width) {
      reject("too few columns");
      continue;
    }
    auto const plat = parse_number(row[c_plat]);
    auto const plng = parse_number(row[c_plng]);
    auto const dlat = parse_number(row[c_dlat]);
    auto const dlng = parse_number(row[c_dlng]);
    if (!plat || !plng || !dlat || !dlng) {
      reject("malformed coordinate");
      continue;
    }
    HistoricTrip t{{*plat, *plng}, {*dlat, *dlng}, {}, std::nullopt};
    try {
      validate(t.pickup);
      validate(t.dropoff);
    } catch (InvalidInput const& e) {
      reject(e.what());
      continue;
    }
    try {
      t.fare = Money::parse_major(row[c_fare], currency);
    } catch (InvalidInput const&) {
      reject("malformed fare_amount");
      continue;
    }
    if (t.fare.minor() < 0) {
      reject("negative fare_amount");
      continue;
    }
    auto const when = trim_copy(row[c_time]);
    if (!when.empty()) {
      try {
        t.timestamp = parse_rfc3339(when);
      } catch (InvalidInput const&) {
        reject("malformed pickup_datetime");
        continue;
      }
    }
    trips.push_back(std::move(t));
  }
  if (source.bad()) {
    throw UnreadableSource("error while reading trip CSV");
  }
  if (trips.empty()) {
    throw EmptyDataset("trip CSV contained no valid rows (" +
                       std::to_string(rejected.size()) + " rejected)");
  }
  return {TripStore{std::move(trips), currency}, std::move(rejected)};
}

IngestResult ingest_trips_file(std::string const& path, std::string const& currency) {
  std::ifstream in{path};
  if (!in) {
    throw UnreadableSource("cannot open trip file '" + path + "'");
  }
  return ingest_trips(in, currency);
}

Money estimate_historical(TripStore const& store, GeoPoint const& origin,
                          GeoPoint const& destination, double radius_m) {
  auto const ids = store.matching(origin, destination, radius_m);
  if (ids.empty()) {
    throw NoDataInVicinity("no historic trips within " + std::to_string(radius_m) +
                           " m of both endpoints");
  }
  std::int64_t sum = 0;
  for (auto const id : ids) {
    sum += store.trips()[id].fare.minor();
  }
  return {div_round_half_away(sum, static_cast<std::int64_t>(ids.size())),
          store.currency()};
}

void write_trips_csv(std::ostream& out, std::span<HistoricTrip const> trips) {
  out << "pickup_datetime,pickup_lat,pickup_lng,dropoff_lat,dropoff_lng,"
         "fare_amount,total_amount\n";
  out << std::setprecision(9);
  for (auto const& t : trips) {
    out << (t.timestamp ? t.timestamp->text : std::string{}) << ',' << t.pickup.lat
        << ',' << t.pickup.lng << ',' << t.dropoff.lat << ',' << t.dropoff.lng << ','
        << t.fare.to_string() << ',' << t.fare.to_string() << '\n';
  }
}

}  // namespace cabfare
