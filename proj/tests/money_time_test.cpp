#include <gtest/gtest.h>

#include "cabfare/error.hpp"
#include "cabfare/money.hpp"
#include "cabfare/time.hpp"

using namespace cabfare;

TEST(Money, ParseMajor) {
  EXPECT_EQ(Money::parse_major("12", "GBP").minor(), 1200);
  EXPECT_EQ(Money::parse_major("12.5", "GBP").minor(), 1250);
  EXPECT_EQ(Money::parse_major("-0.07", "GBP").minor(), -7);
  EXPECT_EQ(Money::parse_major("0.125", "GBP").minor(), 13);
  EXPECT_EQ(Money::parse_major("-0.125", "GBP").minor(), -13);
  EXPECT_THROW(Money::parse_major("1.2.3", "GBP"), InvalidInput);
  EXPECT_THROW(Money::parse_major("", "GBP"), InvalidInput);
}

TEST(Money, Format) {
  EXPECT_EQ((Money{1240, "GBP"}).to_string(), "12.40");
  EXPECT_EQ((Money{-5, "GBP"}).to_string(), "-0.05");
  EXPECT_EQ((Money{0, "USD"}).to_string(), "0.00");
}

TEST(Money, CurrencyMismatch) {
  Money const a{100, "GBP"};
  Money const b{100, "USD"};
  EXPECT_THROW(a + b, CurrencyMismatch);
  EXPECT_THROW((void)(a < b), CurrencyMismatch);
}

TEST(Money, Rounding) {
  EXPECT_EQ(round_half_away(2.5), 3);
  EXPECT_EQ(round_half_away(-2.5), -3);
  EXPECT_EQ(round_half_away(2.4999), 2);
  EXPECT_EQ(div_round_half_away(5, 2), 3);
  EXPECT_EQ(div_round_half_away(-5, 2), -3);
  EXPECT_EQ(div_round_half_away(7, 3), 2);
}

TEST(Time, ParseRfc3339) {
  auto const t = parse_rfc3339("2026-03-10T20:15:30+01:00");
  EXPECT_EQ(t.date.year, 2026);
  EXPECT_EQ(t.date.month, 3);
  EXPECT_EQ(t.date.day, 10);
  EXPECT_EQ(t.minute_of_day(), 20 * 60 + 15);
  EXPECT_EQ(t.utc_offset_s, 3600);
  EXPECT_DOUBLE_EQ(t.epoch_seconds(), parse_rfc3339("2026-03-10T19:15:30Z").epoch_seconds());
  EXPECT_NO_THROW(parse_rfc3339("2026-03-10 20:15:30.25Z"));
  EXPECT_THROW(parse_rfc3339("2026-13-10T00:00:00Z"), InvalidInput);
  EXPECT_THROW(parse_rfc3339("yesterday"), InvalidInput);
}

TEST(Time, HoursMinutes) {
  EXPECT_EQ(parse_hhmm("06:00"), 360);
  EXPECT_EQ(parse_hhmm("24:00"), 1440);
  EXPECT_THROW(parse_hhmm("6:00"), InvalidInput);
  EXPECT_THROW(parse_hhmm("12:60"), InvalidInput);
  EXPECT_EQ(format_hhmm(1320), "22:00");
}
