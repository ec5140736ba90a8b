#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace tca {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;
using std::chrono::days;
using std::chrono::minutes;
using std::chrono::seconds;

/// Wall-clock time of day in the study timezone, minute resolution.
class ClockTime {
 public:
  constexpr ClockTime() = default;
  constexpr ClockTime(int hour, int minute) : minutes_(hour * 60 + minute) {}

  static constexpr ClockTime from_minutes(int m) {
    ClockTime t;
    t.minutes_ = m;
    return t;
  }
  static ClockTime parse(std::string_view text);

  constexpr int minutes_of_day() const { return minutes_; }
  constexpr int hour() const { return minutes_ / 60; }
  constexpr int minute() const { return minutes_ % 60; }
  std::string str() const;

  constexpr auto operator<=>(const ClockTime&) const = default;

 private:
  int minutes_ = 0;
};

/// Fixed-offset study timezone. All participants share one.
struct TimeZone {
  int offset_minutes = 9 * 60;

  Date local_date(Timestamp t) const;
  ClockTime local_time(Timestamp t) const;
  Timestamp at(Date d, ClockTime t) const;
  Timestamp midnight(Date d) const { return at(d, ClockTime{}); }
  std::string offset_str() const;
  static TimeZone parse(std::string_view text);

  auto operator<=>(const TimeZone&) const = default;
};

std::string format_iso(Timestamp t, TimeZone tz);
/// Accepts `YYYY-MM-DDTHH:MM[:SS](Z|+HH:MM|-HH:MM)`.
Timestamp parse_iso(std::string_view text);

std::string format_date(Date d);
Date parse_date(std::string_view text);

/// Monday = 0 ... Sunday = 6.
int weekday_index(Date d);

}  // namespace tca
