#pragma once

#include <string>

namespace cabfare {

struct CalendarDate {
  int year = 1970;
  int month = 1;
  int day = 1;

  friend bool operator==(CalendarDate const&, CalendarDate const&) = default;
};

/// An RFC 3339 timestamp as written: wall-clock fields are the local
/// time used for tariff windows and date rules; `utc_offset_s` only
/// matters when ordering instants.
struct Timestamp {
  CalendarDate date;
  double seconds_of_day = 0.0;  // local wall clock, [0, 86400)
  int utc_offset_s = 0;
  std::string text;              // canonical echo of the input

  int minute_of_day() const noexcept {
    return static_cast<int>(seconds_of_day) / 60;
  }

  /// Seconds since 1970-01-01T00:00:00Z.
  double epoch_seconds() const noexcept;
};

/// Accepts "YYYY-MM-DDTHH:MM:SS[.fff](Z|±HH:MM)"; a space may replace 'T'.
/// A missing zone designator is read as UTC. Throws InvalidInput.
Timestamp parse_rfc3339(std::string const& text);

/// Current wall-clock time in the process's local zone.
Timestamp local_now();

/// Parses "HH:MM" to minutes after midnight; "24:00" is accepted as 1440.
int parse_hhmm(std::string const& text);

std::string format_hhmm(int minute_of_day);

/// Parses "YYYY-MM-DD". Throws InvalidInput.
CalendarDate parse_date(std::string const& text);

}  // namespace cabfare
