#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace panelvar {

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
struct Date {
  std::int32_t days = 0;

  auto operator<=>(const Date&) const = default;

  static Date from_ymd(int year, int month, int day);
  static Date parse(const std::string& iso);  // "YYYY-MM-DD"

  void to_ymd(int& year, int& month, int& day) const;
  int weekday() const;  // 0 = Monday .. 6 = Sunday
  std::string to_string() const;

  Date next_weekday() const;  // next Mon-Fri date strictly after this one
};

// UTC instant, microsecond resolution.
struct Timestamp {
  std::int64_t micros = 0;  // since 1970-01-01T00:00:00Z

  auto operator<=>(const Timestamp&) const = default;

  // ISO-8601 with offset: 2011-03-16T09:31:02.5-05:00, ...T14:31:02Z.
  // A space is accepted in place of 'T'. Throws data_error on anything else.
  static Timestamp parse(const std::string& iso);

  Date utc_date() const;
  std::int64_t micros_of_day() const;
  std::string to_string() const;  // ISO-8601, Z suffix
};

constexpr std::int64_t kMicrosPerSecond = 1000000;
constexpr std::int64_t kMicrosPerMinute = 60 * kMicrosPerSecond;
constexpr std::int64_t kMicrosPerDay = 86400 * kMicrosPerSecond;

// "HH:MM" or "HH:MM:SS" -> microseconds past midnight.
std::int64_t parse_time_of_day(const std::string& hhmm);
std::string format_time_of_day(std::int64_t micros);

}  // namespace panelvar
