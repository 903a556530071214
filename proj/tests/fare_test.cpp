#include <gtest/gtest.h>

#include <random>

#include "cabfare/error.hpp"
#include "cabfare/flex.hpp"
#include "cabfare/meter.hpp"
#include "cabfare/tariff.hpp"
#include "oracles.hpp"

using namespace cabfare;
using nlohmann::json;

namespace {

RateWindow window(std::string name, char const* start, char const* end, std::int64_t flag,
                  std::int64_t inc, double unit_m, double unit_s, std::string const& cur) {
  return {std::move(name), parse_hhmm(start), parse_hhmm(end), {flag, cur}, {inc, cur},
          unit_m, unit_s};
}

TariffScheme london() {
  TariffScheme s;
  s.name = "london";
  s.currency = "GBP";
  s.minimum_fare = {240, "GBP"};
  s.correction_coefficient = 0.9;
  s.rate_windows = {window("rate 1", "06:00", "20:00", 240, 20, 126.1, 27.2, "GBP"),
                    window("rate 2", "20:00", "22:00", 240, 20, 102.7, 22.1, "GBP"),
                    window("rate 3", "22:00", "06:00", 240, 20, 86.4, 18.6, "GBP")};
  return s;
}

TariffScheme nyc() {
  TariffScheme s;
  s.name = "nyc";
  s.currency = "USD";
  s.mode = MeterMode::distance_unless_slow;
  s.slow_speed_threshold_mps = 5.36;
  s.minimum_fare = {250, "USD"};
  s.rate_windows = {window("standard", "00:00", "00:00", 250, 50, 321.868, 50, "USD")};
  return s;
}

Route route(std::vector<RouteSegment> segs) {
  // an empty route is only valid between coincident endpoints
  GeoPoint const to = segs.empty() ? GeoPoint{40.75, -73.98} : GeoPoint{40.76, -73.97};
  return {{40.75, -73.98}, to, std::move(segs)};
}

Timestamp noon() { return parse_rfc3339("2026-03-10T12:00:00Z"); }

FlexPricingModel nyc_flex() {
  return {"uber x nyc", "USD", {255, "USD"}, {35, "USD"}, {175, "USD"}, {0, "USD"}};
}

FlexPricingModel london_flex() {
  return {"uber x london", "GBP", {0, "GBP"}, {15, "GBP"}, {125, "GBP"}, {500, "GBP"}};
}

}  // namespace

TEST(RateWindows, ResolveLondon) {
  auto const s = london();
  EXPECT_NO_THROW(validate(s));
  EXPECT_EQ(resolve_rate(s, 12 * 60).name, "rate 1");
  EXPECT_EQ(resolve_rate(s, 20 * 60).name, "rate 2");
  EXPECT_EQ(resolve_rate(s, 23 * 60 + 30).name, "rate 3");
  EXPECT_EQ(resolve_rate(s, 5 * 60 + 59).name, "rate 3");
  EXPECT_EQ(resolve_rate(s, 6 * 60).name, "rate 1");
}

TEST(RateWindows, GapAndOverlapAreRejected) {
  auto gap = london();
  gap.rate_windows[1].end_minute = parse_hhmm("21:30");
  try {
    validate(gap);
    FAIL() << "gap accepted";
  } catch (InvalidScheme const& e) {
    EXPECT_NE(std::string{e.what()}.find("21:30"), std::string::npos) << e.what();
  }
  auto overlap = london();
  overlap.rate_windows[0].end_minute = parse_hhmm("20:30");
  EXPECT_THROW(validate(overlap), InvalidScheme);
}

TEST(TariffJson, RoundTrip) {
  auto s = london();
  s.extras.push_back({"airport", ExtraTrigger::origin_zone, Zone{{51.47, -0.4543}, 2000}, {},
                      {280, "GBP"}});
  s.extras.push_back({"xmas", ExtraTrigger::date_rule, std::nullopt, {{0, 12, 25}},
                      {400, "GBP"}});
  auto const back = tariff_from_json(to_json(s));
  EXPECT_EQ(to_json(back), to_json(s));
  EXPECT_EQ(back.rate_windows.size(), 3u);
  EXPECT_DOUBLE_EQ(back.correction_coefficient, 0.9);
}

TEST(TariffJson, SchemeInvariants) {
  auto j = to_json(nyc());
  j.erase("slow_speed_threshold_mps");
  EXPECT_THROW(tariff_from_json(j), InvalidScheme);
  auto k = to_json(london());
  k["minimum_fare_minor"] = -1;
  EXPECT_THROW(tariff_from_json(k), InvalidScheme);
}

TEST(Meter, NycFastMile) {
  auto const r = run_meter(route({{1609.34, 200}}), nyc(), noon());
  EXPECT_EQ(r.ticks, 5);
  EXPECT_EQ(r.total().minor(), 500);
}

TEST(Meter, NycStoppedSegment) {
  EXPECT_EQ(simulate_meter(route({{0, 150}}), nyc(), noon()).minor(), 400);
  EXPECT_EQ(simulate_meter(route({{1609.34, 200}, {0, 150}}), nyc(), noon()).minor(), 650);
}

TEST(Meter, EmptyRouteIsMinimum) {
  EXPECT_EQ(simulate_meter(route({}), london(), noon()).minor(), 240);
}

TEST(Meter, RateWindowAtStart) {
  // 1000 m at 2 m/s: rate 1 ticks every 27.2 s (500 s -> 18), rate 3 every 18.6 s (26)
  auto const r1 = run_meter(route({{1000, 500}}), london(), noon());
  auto const r3 = run_meter(route({{1000, 500}}), london(), parse_rfc3339("2026-03-10T23:30:00Z"));
  EXPECT_EQ(r1.rate_window, "rate 1");
  EXPECT_EQ(r3.rate_window, "rate 3");
  EXPECT_EQ(r1.ticks, 18);
  EXPECT_EQ(r3.ticks, 26);
}

TEST(Meter, ExtrasAfterCorrection) {
  auto s = london();
  s.extras.push_back({"airport", ExtraTrigger::origin_zone, Zone{{51.47, -0.4543}, 2000}, {},
                      {280, "GBP"}});
  s.extras.push_back({"xmas", ExtraTrigger::date_rule, std::nullopt, {{0, 12, 25}},
                      {400, "GBP"}});
  Route const r{{51.471, -0.454}, {51.5, -0.12}, {{2000, 360}}};
  auto const plain = run_meter(r, s, noon());
  EXPECT_EQ(plain.extras.minor(), 280);
  EXPECT_EQ(plain.applied_extras, std::vector<std::string>{"airport"});
  auto const xmas = run_meter(r, s, parse_rfc3339("2026-12-25T12:00:00Z"));
  EXPECT_EQ(xmas.extras.minor(), 680);
  EXPECT_EQ(corrected_fare(xmas, s).minor(),
            apply_correction(xmas.clamped, s).minor() + 680);
}

TEST(Correction, ReferenceValues) {
  auto const s = london();
  EXPECT_EQ(apply_correction({2000, "GBP"}, s).minor(), 1800);
  EXPECT_EQ(apply_correction({250, "GBP"}, s).minor(), 240);
  EXPECT_EQ(apply_correction({245, "GBP"}, s).minor(), 240);
  EXPECT_EQ(apply_correction({2005, "GBP"}, s).minor(), 1805);  // 1804.5 rounds away
  auto identity = s;
  identity.correction_coefficient = 1.0;
  EXPECT_EQ(apply_correction({1234, "GBP"}, identity).minor(), 1234);
}

TEST(Meter, LatticeOracle) {
  std::mt19937_64 rng{424242};
  for (int i = 0; i < 200; ++i) {
    auto const c = oracle::random_case(rng);
    auto const route = oracle::to_route(c);
    auto const scheme = oracle::to_scheme(c, 0.9);
    char buf[32];
    std::snprintf(buf, sizeof buf, "2026-03-10T%02d:%02d:00Z", c.start_minute / 60,
                  c.start_minute % 60);
    auto const reading = run_meter(route, scheme, parse_rfc3339(buf));
    auto const expect = oracle::lattice_fare(c);
    ASSERT_EQ(reading.total().minor(), expect) << "case " << i;
    ASSERT_EQ(corrected_fare(reading, scheme).minor(),
              oracle::corrected_point_nine(expect, c.minimum))
        << "case " << i;
  }
}

TEST(Meter, SplitInvariance) {
  // splitting a segment into two at the same speed leaves the fare unchanged
  std::mt19937_64 rng{99};
  std::uniform_real_distribution<double> len{50, 3000};
  std::uniform_real_distribution<double> speed{0.5, 15};
  std::uniform_real_distribution<double> frac{0.1, 0.9};
  for (auto const& scheme : {london(), nyc()}) {
    for (int i = 0; i < 300; ++i) {
      auto const l = len(rng);
      auto const v = speed(rng);
      auto const f = frac(rng);
      auto const whole = simulate_meter(route({{l, l / v}}), scheme, noon());
      auto const split =
          simulate_meter(route({{l * f, l * f / v}, {l * (1 - f), l * (1 - f) / v}}), scheme,
                         noon());
      EXPECT_LE(std::llabs(whole.minor() - split.minor()),
                resolve_rate(scheme, noon()).increment.minor())
          << l << " m at " << v;
    }
  }
}

TEST(Meter, MonotoneInAppendedSegments) {
  std::mt19937_64 rng{5};
  std::uniform_real_distribution<double> len{0, 2000};
  std::uniform_real_distribution<double> dur{1, 400};
  for (auto const& scheme : {london(), nyc()}) {
    std::vector<RouteSegment> segs;
    std::int64_t last = simulate_meter(route(segs), scheme, noon()).minor();
    for (int i = 0; i < 200; ++i) {
      segs.push_back({len(rng), dur(rng)});
      auto const now = simulate_meter(route(segs), scheme, noon()).minor();
      EXPECT_GE(now, last);
      EXPECT_GE(now, scheme.minimum_fare.minor());
      last = now;
    }
  }
}

TEST(Flex, ReferenceParameters) {
  Route const nyc_trip = route({{3 * kMetersPerMile, 600}});
  EXPECT_EQ(estimate_flex(nyc_trip, nyc_flex()).minor(), 1130);
  EXPECT_EQ(estimate_flex(nyc_trip, nyc_flex(), SurgeState{1.5}).minor(), 1695);
  Route const short_trip = route({{0.5 * kMetersPerMile, 120}});
  EXPECT_EQ(estimate_flex(short_trip, london_flex()).minor(), 500);
}

TEST(Flex, SurgeValidationAndLinearity) {
  EXPECT_THROW(SurgeState{0.99}, InvalidInput);
  EXPECT_THROW(SurgeState{std::nan("")}, InvalidInput);
  std::mt19937_64 rng{8};
  std::uniform_real_distribution<double> len{3000, 30000};
  std::uniform_real_distribution<double> k{1.0, 3.0};
  for (int i = 0; i < 500; ++i) {
    auto const l = len(rng);
    auto const r = route({{l, l / 7}});
    auto const base = estimate_flex(r, nyc_flex()).minor();
    auto const m = k(rng);
    auto const surged = estimate_flex(r, nyc_flex(), SurgeState{m}).minor();
    EXPECT_LE(std::fabs(static_cast<double>(surged) - m * static_cast<double>(base)), 1.0 + m);
  }
}

TEST(Flex, NeverBelowMinimum) {
  std::mt19937_64 rng{12};
  std::uniform_real_distribution<double> len{0, 5000};
  for (int i = 0; i < 500; ++i) {
    auto const l = len(rng);
    EXPECT_GE(estimate_flex(route({{l, l / 9 + 1}}), london_flex()).minor(), 500);
  }
}

TEST(MeanOfRange, WholeUnitsTiesUp) {
  auto const m = [](std::int64_t lo, std::int64_t hi) {
    return mean_of_range({lo * 100, "USD"}, {hi * 100, "USD"}).minor();
  };
  EXPECT_EQ(m(10, 14), 1200);
  EXPECT_EQ(m(14, 19), 1700);
  EXPECT_EQ(m(8, 8), 800);
  EXPECT_THROW(m(9, 8), RangeInverted);
  EXPECT_THROW(mean_of_range({100, "USD"}, {200, "GBP"}), CurrencyMismatch);
}

TEST(FlexJson, Loader) {
  auto const m = flex_model_from_json(json::parse(
      R"({"name": "x", "currency": "USD", "base_fare_minor": 255, "per_minute_minor": 35,
          "per_mile_minor": 175, "minimum_fare_minor": 0})"));
  EXPECT_EQ(m.base_fare.minor(), 255);
  EXPECT_THROW(flex_model_from_json(json::parse(R"({"name": "x", "currency": "USD"})")),
               ConfigError);
}
