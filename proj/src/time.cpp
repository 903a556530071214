#include "cabfare/time.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "cabfare/error.hpp"

namespace cabfare {

namespace {

bool digits(std::string const& s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) {
    return false;
  }
  out = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') {
      return false;
    }
    out = out * 10 + (s[i] - '0');
  }
  return true;
}

bool valid_date(CalendarDate const& d) {
  using namespace std::chrono;
  return year_month_day{year{d.year}, month{static_cast<unsigned>(d.month)},
                        day{static_cast<unsigned>(d.day)}}
      .ok();
}

[[noreturn]] void bad_timestamp(std::string const& text) {
  throw InvalidInput("malformed timestamp '" + text +
                     "': expected RFC 3339 (YYYY-MM-DDTHH:MM:SSZ)");
}

}  // namespace

double Timestamp::epoch_seconds() const noexcept {
  using namespace std::chrono;
  auto const days =
      sys_days{year_month_day{year{date.year},
                              month{static_cast<unsigned>(date.month)},
                              day{static_cast<unsigned>(date.day)}}}
          .time_since_epoch()
          .count();
  return static_cast<double>(days) * 86400.0 + seconds_of_day -
         static_cast<double>(utc_offset_s);
}

CalendarDate parse_date(std::string const& text) {
  CalendarDate d;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !digits(text, 0, 4, d.year) || !digits(text, 5, 2, d.month) ||
      !digits(text, 8, 2, d.day) || !valid_date(d)) {
    throw InvalidInput("malformed date '" + text + "': expected YYYY-MM-DD");
  }
  return d;
}

Timestamp parse_rfc3339(std::string const& text) {
  Timestamp ts;
  ts.text = text;
  if (text.size() < 19) {
    bad_timestamp(text);
  }
  try {
    ts.date = parse_date(text.substr(0, 10));
  } catch (InvalidInput const&) {
    bad_timestamp(text);
  }
  int hh = 0;
  int mm = 0;
  int ss = 0;
  if ((text[10] != 'T' && text[10] != 't' && text[10] != ' ') ||
      !digits(text, 11, 2, hh) || text[13] != ':' || !digits(text, 14, 2, mm) ||
      text[16] != ':' || !digits(text, 17, 2, ss) || hh > 23 || mm > 59 ||
      ss > 60) {
    bad_timestamp(text);
  }
  double frac = 0.0;
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    double scale = 0.1;
    auto const start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      frac += (text[pos] - '0') * scale;
      scale /= 10.0;
      ++pos;
    }
    if (pos == start) {
      bad_timestamp(text);
    }
  }
  if (pos == text.size() || text[pos] == 'Z' || text[pos] == 'z') {
    if (pos < text.size()) {
      ++pos;
    }
  } else if (text[pos] == '+' || text[pos] == '-') {
    int oh = 0;
    int om = 0;
    if (!digits(text, pos + 1, 2, oh) || pos + 3 >= text.size() ||
        text[pos + 3] != ':' || !digits(text, pos + 4, 2, om) || oh > 23 ||
        om > 59) {
      bad_timestamp(text);
    }
    ts.utc_offset_s = (text[pos] == '-' ? -1 : 1) * (oh * 3600 + om * 60);
    pos += 6;
  } else {
    bad_timestamp(text);
  }
  if (pos != text.size()) {
    bad_timestamp(text);
  }
  ts.seconds_of_day = hh * 3600.0 + mm * 60.0 + std::min(ss, 59) + frac;
  return ts;
}

Timestamp local_now() {
  auto const now = std::time(nullptr);
  std::tm tm{};
  localtime_r(&now, &tm);
  char buf[96];
  auto const off = tm.tm_gmtoff;
  auto const aoff = off < 0 ? -off : off;
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d%c%02ld:%02ld",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, off < 0 ? '-' : '+', aoff / 3600,
                (aoff % 3600) / 60);
  return parse_rfc3339(buf);
}

int parse_hhmm(std::string const& text) {
  int hh = 0;
  int mm = 0;
  if (text.size() != 5 || text[2] != ':' || !digits(text, 0, 2, hh) ||
      !digits(text, 3, 2, mm) || mm > 59 || hh > 24 || (hh == 24 && mm != 0)) {
    throw InvalidInput("malformed time of day '" + text + "': expected HH:MM");
  }
  return hh * 60 + mm;
}

std::string format_hhmm(int minute_of_day) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minute_of_day / 60,
                minute_of_day % 60);
  return buf;
}

}  // namespace cabfare
