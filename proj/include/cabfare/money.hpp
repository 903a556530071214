#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace cabfare {

/// Amount in integer minor units (cents, pence) of an ISO-4217 currency.
/// Arithmetic and ordering are defined only between identical currencies.
class Money {
 public:
  Money() = default;
  Money(std::int64_t minor, std::string currency)
      : minor_(minor), currency_(std::move(currency)) {}

  static Money zero(std::string currency) { return {0, std::move(currency)}; }

  /// Parses a decimal amount in major units ("12", "12.5", "-0.07").
  /// More than two fractional digits round half away from zero.
  static Money parse_major(std::string_view text, std::string currency);

  std::int64_t minor() const noexcept { return minor_; }
  std::string const& currency() const noexcept { return currency_; }
  double major() const noexcept { return static_cast<double>(minor_) / 100.0; }

  /// Two-decimal display ("12.40", "-0.05").
  std::string to_string() const;

  Money operator+(Money const& o) const;
  Money operator-(Money const& o) const;
  Money& operator+=(Money const& o);

  bool operator==(Money const& o) const noexcept = default;
  std::strong_ordering operator<=>(Money const& o) const;

 private:
  void require_same(Money const& o) const;

  std::int64_t minor_ = 0;
  std::string currency_;
};

/// round(x) with ties away from zero; x is already in minor units.
std::int64_t round_half_away(double x);

/// Rounded integer division, ties away from zero. `den` must be non-zero.
std::int64_t div_round_half_away(std::int64_t num, std::int64_t den);

std::string format_minor(std::int64_t minor);

}  // namespace cabfare
