#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cabfare/error.hpp"
#include "cabfare/historical.hpp"
#include "oracles.hpp"

using namespace cabfare;

namespace {

GeoPoint north_of(GeoPoint p, double m) {
  return {p.lat + m / kEarthRadiusM * 180.0 / 3.14159265358979323846, p.lng};
}

std::vector<HistoricTrip> random_trips(std::mt19937_64& rng, std::size_t n) {
  // clustered around a handful of hubs so radius queries find matches
  std::vector<GeoPoint> const hubs{{40.758, -73.9855}, {40.7527, -73.9772}, {40.7484, -73.9857},
                                   {40.7061, -74.0087}, {40.7794, -73.9632}};
  std::uniform_int_distribution<std::size_t> hub{0, hubs.size() - 1};
  std::normal_distribution<double> jitter{0, 0.0012};
  std::uniform_int_distribution<std::int64_t> fare{250, 6000};
  std::vector<HistoricTrip> trips;
  for (std::size_t i = 0; i < n; ++i) {
    auto const a = hubs[hub(rng)];
    auto const b = hubs[hub(rng)];
    trips.push_back({{a.lat + jitter(rng), a.lng + jitter(rng)},
                     {b.lat + jitter(rng), b.lng + jitter(rng)},
                     {fare(rng), "USD"},
                     std::nullopt});
  }
  return trips;
}

}  // namespace

TEST(Historical, MatchesBruteForceOracle) {
  std::mt19937_64 rng{2016};
  auto trips = random_trips(rng, 10000);
  TripStore const store{trips, "USD"};
  auto queries = random_trips(rng, 100);
  int hits = 0;
  for (auto const& q : queries) {
    for (double radius : {60.0, 100.0, 250.0}) {
      auto const expect = oracle::vicinity_mean(trips, q.pickup, q.dropoff, radius);
      if (expect) {
        ++hits;
        EXPECT_EQ(estimate_historical(store, q.pickup, q.dropoff, radius).minor(), *expect);
      } else {
        EXPECT_THROW(estimate_historical(store, q.pickup, q.dropoff, radius), NoDataInVicinity);
      }
    }
  }
  EXPECT_GT(hits, 100);
}

TEST(Historical, RadiusBoundary) {
  GeoPoint const o{40.758, -73.9855};
  GeoPoint const d{40.7527, -73.9772};
  std::vector<HistoricTrip> const trips{
      {north_of(o, 99), d, {1000, "USD"}, std::nullopt},
      {north_of(o, 101), d, {9000, "USD"}, std::nullopt},
      {o, north_of(d, 101), {9000, "USD"}, std::nullopt},
  };
  TripStore const store{trips, "USD"};
  EXPECT_EQ(store.matching(o, d, 100), std::vector<std::size_t>{0});
  EXPECT_EQ(estimate_historical(store, o, d).minor(), 1000);
}

TEST(Historical, MeanRoundsHalfAway) {
  GeoPoint const o{40.7, -74.0};
  GeoPoint const d{40.8, -73.9};
  TripStore const store{{{o, d, {1000, "USD"}, std::nullopt}, {o, d, {1001, "USD"}, std::nullopt}},
                        "USD"};
  EXPECT_EQ(estimate_historical(store, o, d).minor(), 1001);
}

TEST(Ingest, AcceptsAndRejects) {
  std::istringstream in{
      "pickup_datetime,pickup_lat,pickup_lng,dropoff_lat,dropoff_lng,fare_amount,total_amount\n"
      "2015-03-01T01:50:00Z,40.73,-73.99,40.77,-73.87,25.52,29.35\n"
      "2015-03-01T01:50:00Z,abc,-73.99,40.77,-73.87,25.52,29.35\n"
      "2015-03-01T01:50:00Z,95,-73.99,40.77,-73.87,25.52,29.35\n"
      "2015-03-01T01:50:00Z,40.73,-73.99,40.77,-73.87,-4,29.35\n"
      "2015-03-01T01:50:00Z,40.73,-73.99\n"
      "not a time,40.73,-73.99,40.77,-73.87,10,12\n"
      ",40.73,-73.99,40.77,-73.87,10.005,12\n"};
  auto const r = ingest_trips(in, "USD");
  EXPECT_EQ(r.accepted(), 2u);
  ASSERT_EQ(r.rejected.size(), 5u);
  EXPECT_EQ(r.rejected[0].line, 3u);
  EXPECT_EQ(r.rejected[0].reason, "malformed coordinate");
  EXPECT_EQ(r.rejected[2].reason, "negative fare_amount");
  EXPECT_EQ(r.rejected[3].reason, "too few columns");
  EXPECT_EQ(r.rejected[4].reason, "malformed pickup_datetime");
  EXPECT_EQ(r.store.trips()[1].fare.minor(), 1001);
  EXPECT_FALSE(r.store.trips()[1].timestamp);
}

TEST(Ingest, Failures) {
  std::istringstream empty{""};
  EXPECT_THROW(ingest_trips(empty, "USD"), UnreadableSource);
  std::istringstream no_fare{"pickup_datetime,pickup_lat,pickup_lng,dropoff_lat,dropoff_lng\n"};
  EXPECT_THROW(ingest_trips(no_fare, "USD"), UnreadableSource);
  std::istringstream all_bad{
      "pickup_datetime,pickup_lat,pickup_lng,dropoff_lat,dropoff_lng,fare_amount\n,x,1,1,1,1\n"};
  EXPECT_THROW(ingest_trips(all_bad, "USD"), EmptyDataset);
  EXPECT_THROW(ingest_trips_file("/nonexistent/trips.csv", "USD"), UnreadableSource);
}

TEST(Ingest, WriteReadRoundTrip) {
  std::mt19937_64 rng{4};
  auto const trips = random_trips(rng, 50);
  std::ostringstream out;
  write_trips_csv(out, trips);
  std::istringstream in{out.str()};
  auto const back = ingest_trips(in, "USD");
  ASSERT_EQ(back.accepted(), trips.size());
  for (std::size_t i = 0; i < trips.size(); ++i) {
    EXPECT_EQ(back.store.trips()[i].fare, trips[i].fare);
    EXPECT_NEAR(back.store.trips()[i].pickup.lat, trips[i].pickup.lat, 1e-6);
    EXPECT_NEAR(back.store.trips()[i].dropoff.lng, trips[i].dropoff.lng, 1e-6);
  }
}
