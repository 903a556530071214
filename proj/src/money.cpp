#include "cabfare/money.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "cabfare/error.hpp"

namespace cabfare {

Money Money::parse_major(std::string_view text, std::string currency) {
  auto const fail = [&] {
    throw InvalidInput("malformed amount '" + std::string{text} + "'");
  };
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  if (text.empty()) {
    fail();
  }
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  std::int64_t whole = 0;
  std::size_t i = 0;
  bool any_digit = false;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    whole = whole * 10 + (text[i] - '0');
    any_digit = true;
    if (whole > 1'000'000'000'000LL) {
      fail();
    }
  }
  std::int64_t frac = 0;  // hundredths
  if (i < text.size() && text[i] == '.') {
    ++i;
    int digits = 0;
    bool round_up = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      any_digit = true;
      if (digits < 2) {
        frac = frac * 10 + (text[i] - '0');
      } else if (digits == 2) {
        round_up = text[i] >= '5';
      }
      ++digits;
    }
    if (digits == 1) {
      frac *= 10;
    }
    if (round_up) {
      ++frac;
    }
  }
  if (i != text.size() || !any_digit) {
    fail();
  }
  auto const minor = whole * 100 + frac;
  return {negative ? -minor : minor, std::move(currency)};
}

std::string format_minor(std::int64_t minor) {
  auto const negative = minor < 0;
  auto const abs = negative ? -minor : minor;
  auto const cents = abs % 100;
  std::string out = negative ? "-" : "";
  out += std::to_string(abs / 100);
  out += '.';
  out += static_cast<char>('0' + cents / 10);
  out += static_cast<char>('0' + cents % 10);
  return out;
}

std::string Money::to_string() const { return format_minor(minor_); }

void Money::require_same(Money const& o) const {
  if (currency_ != o.currency_) {
    throw CurrencyMismatch("currency mismatch: " + currency_ + " vs " +
                           o.currency_);
  }
}

Money Money::operator+(Money const& o) const {
  require_same(o);
  return {minor_ + o.minor_, currency_};
}

Money Money::operator-(Money const& o) const {
  require_same(o);
  return {minor_ - o.minor_, currency_};
}

Money& Money::operator+=(Money const& o) {
  require_same(o);
  minor_ += o.minor_;
  return *this;
}

std::strong_ordering Money::operator<=>(Money const& o) const {
  require_same(o);
  return minor_ <=> o.minor_;
}

std::int64_t round_half_away(double x) {
  // Absorb representation error before deciding a tie (e.g. 92.49999999999).
  auto const nudged = x + std::copysign(1e-9 * std::max(1.0, std::abs(x)), x);
  return static_cast<std::int64_t>(std::llround(nudged));
}

std::int64_t div_round_half_away(std::int64_t num, std::int64_t den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  auto const q = num / den;
  auto const r = num % den;
  if (2 * std::abs(r) >= den) {
    return q + (num < 0 ? -1 : 1);
  }
  return q;
}

}  // namespace cabfare
