#include "tca/core/time.hpp"

#include <charconv>

#include <fmt/format.h>

#include "tca/core/error.hpp"

namespace tca {

namespace {

int parse_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view what) {
  if (pos + len > text.size()) fail(ErrorCode::schema, "truncated " + std::string(what) + ": " + std::string(text));
  int value = 0;
  auto first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    fail(ErrorCode::schema, "bad " + std::string(what) + ": " + std::string(text));
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    fail(ErrorCode::schema, "malformed time text: " + std::string(text));
  }
}

}  // namespace

ClockTime ClockTime::parse(std::string_view text) {
  if (text.size() != 5) fail(ErrorCode::schema, "clock time must be HH:MM: " + std::string(text));
  int h = parse_int(text, 0, 2, "hour");
  expect_char(text, 2, ':');
  int m = parse_int(text, 3, 2, "minute");
  if (h > 23 || m > 59) fail(ErrorCode::schema, "clock time out of range: " + std::string(text));
  return ClockTime(h, m);
}

std::string ClockTime::str() const {
  return fmt::format("{:02d}:{:02d}", hour(), minute());
}

Date TimeZone::local_date(Timestamp t) const {
  return std::chrono::floor<days>(t + minutes(offset_minutes));
}

ClockTime TimeZone::local_time(Timestamp t) const {
  auto local = t + minutes(offset_minutes);
  auto since_midnight = std::chrono::floor<minutes>(local - std::chrono::floor<days>(local));
  return ClockTime::from_minutes(static_cast<int>(since_midnight.count()));
}

Timestamp TimeZone::at(Date d, ClockTime t) const {
  return Timestamp{d} + minutes(t.minutes_of_day()) - minutes(offset_minutes);
}

std::string TimeZone::offset_str() const {
  int m = offset_minutes < 0 ? -offset_minutes : offset_minutes;
  return fmt::format("{}{:02d}:{:02d}", offset_minutes < 0 ? '-' : '+', m / 60, m % 60);
}

TimeZone TimeZone::parse(std::string_view text) {
  if (text == "Z" || text == "UTC") return TimeZone{0};
  if (text.size() != 6 || (text[0] != '+' && text[0] != '-')) {
    fail(ErrorCode::schema, "timezone offset must be +HH:MM: " + std::string(text));
  }
  int h = parse_int(text, 1, 2, "offset hour");
  expect_char(text, 3, ':');
  int m = parse_int(text, 4, 2, "offset minute");
  int total = h * 60 + m;
  return TimeZone{text[0] == '-' ? -total : total};
}

std::string format_iso(Timestamp t, TimeZone tz) {
  auto local = t + minutes(tz.offset_minutes);
  auto day = std::chrono::floor<days>(local);
  std::chrono::year_month_day ymd{day};
  std::chrono::hh_mm_ss hms{local - day};
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}{}", int(ymd.year()), unsigned(ymd.month()),
                     unsigned(ymd.day()), hms.hours().count(), hms.minutes().count(), hms.seconds().count(),
                     tz.offset_str());
}

Timestamp parse_iso(std::string_view text) {
  if (text.size() < 17) fail(ErrorCode::schema, "timestamp too short: " + std::string(text));
  Date d = parse_date(text.substr(0, 10));
  expect_char(text, 10, 'T');
  int h = parse_int(text, 11, 2, "hour");
  expect_char(text, 13, ':');
  int m = parse_int(text, 14, 2, "minute");
  std::size_t pos = 16;
  int s = 0;
  if (pos < text.size() && text[pos] == ':') {
    s = parse_int(text, 17, 2, "second");
    pos = 19;
  }
  if (h > 23 || m > 59 || s > 60) fail(ErrorCode::schema, "timestamp out of range: " + std::string(text));
  if (pos >= text.size()) fail(ErrorCode::schema, "timestamp missing offset: " + std::string(text));
  TimeZone tz = TimeZone::parse(text.substr(pos));
  return Timestamp{d} + std::chrono::hours(h) + minutes(m) + seconds(s) - minutes(tz.offset_minutes);
}

std::string format_date(Date d) {
  std::chrono::year_month_day ymd{d};
  return fmt::format("{:04d}-{:02d}-{:02d}", int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()));
}

Date parse_date(std::string_view text) {
  if (text.size() != 10) fail(ErrorCode::schema, "date must be YYYY-MM-DD: " + std::string(text));
  int y = parse_int(text, 0, 4, "year");
  expect_char(text, 4, '-');
  int mo = parse_int(text, 5, 2, "month");
  expect_char(text, 7, '-');
  int d = parse_int(text, 8, 2, "day");
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(mo)},
                                  std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) fail(ErrorCode::schema, "invalid calendar date: " + std::string(text));
  return Date{ymd};
}

int weekday_index(Date d) {
  return static_cast<int>(std::chrono::weekday{d}.iso_encoding()) - 1;
}

}  // namespace tca
