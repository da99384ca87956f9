#include "panelvar/dates.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

#include "panelvar/common.hpp"

namespace panelvar {

namespace {

// Civil-date conversions after Howard Hinnant's chrono-compatible algorithms.
std::int32_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int32_t>(doe) - 719468;
}

void civil_from_days(std::int32_t z, int& y, int& m, int& d) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int yr = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = yr + (m <= 2);
}

bool is_digits(const std::string& s, std::size_t pos, std::size_t count) {
  if (pos + count > s.size()) return false;
  for (std::size_t i = 0; i < count; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[pos + i]))) return false;
  return true;
}

int to_int(const std::string& s, std::size_t pos, std::size_t count) {
  int v = 0;
  for (std::size_t i = 0; i < count; ++i) v = v * 10 + (s[pos + i] - '0');
  return v;
}

}  // namespace

Date Date::from_ymd(int year, int month, int day) {
  if (month < 1 || month > 12 || day < 1 || day > 31)
    throw data_error("invalid date components: " + std::to_string(year) + "-" + std::to_string(month) + "-" +
                     std::to_string(day));
  return Date{days_from_civil(year, month, day)};
}

Date Date::parse(const std::string& iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' || !is_digits(iso, 0, 4) || !is_digits(iso, 5, 2) ||
      !is_digits(iso, 8, 2))
    throw data_error("unparseable date: '" + iso + "'");
  return from_ymd(to_int(iso, 0, 4), to_int(iso, 5, 2), to_int(iso, 8, 2));
}

void Date::to_ymd(int& year, int& month, int& day) const { civil_from_days(days, year, month, day); }

int Date::weekday() const {
  // 1970-01-01 was a Thursday (index 3 with Monday = 0).
  int w = (days + 3) % 7;
  return w < 0 ? w + 7 : w;
}

std::string Date::to_string() const {
  int y, m, d;
  to_ymd(y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

Date Date::next_weekday() const {
  Date d{days + 1};
  while (d.weekday() > 4) d.days++;
  return d;
}

Timestamp Timestamp::parse(const std::string& iso) {
  // Date part.
  if (iso.size() < 11 || iso[4] != '-' || iso[7] != '-' || (iso[10] != 'T' && iso[10] != ' '))
    throw data_error("unparseable timestamp: '" + iso + "'");
  Date date = Date::parse(iso.substr(0, 10));

  std::size_t pos = 11;
  if (!is_digits(iso, pos, 2) || pos + 5 > iso.size() || iso[pos + 2] != ':' || !is_digits(iso, pos + 3, 2))
    throw data_error("unparseable timestamp: '" + iso + "'");
  int hh = to_int(iso, pos, 2);
  int mm = to_int(iso, pos + 3, 2);
  pos += 5;
  int ss = 0;
  if (pos < iso.size() && iso[pos] == ':') {
    if (!is_digits(iso, pos + 1, 2)) throw data_error("unparseable timestamp: '" + iso + "'");
    ss = to_int(iso, pos + 1, 2);
    pos += 3;
  }
  std::int64_t frac_micros = 0;
  if (pos < iso.size() && iso[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    while (pos < iso.size() && std::isdigit(static_cast<unsigned char>(iso[pos]))) ++pos;
    if (pos == start) throw data_error("unparseable timestamp: '" + iso + "'");
    // Keep microsecond precision; extra digits are truncated.
    std::int64_t scale = 100000;
    for (std::size_t i = start; i < pos && scale > 0; ++i, scale /= 10) frac_micros += (iso[i] - '0') * scale;
  }

  // Offset: Z or +HH:MM / -HH:MM (also +HHMM).
  if (pos >= iso.size()) throw data_error("timestamp missing UTC offset: '" + iso + "'");
  std::int64_t offset_micros = 0;
  char c = iso[pos];
  if (c == 'Z' || c == 'z') {
    ++pos;
  } else if (c == '+' || c == '-') {
    if (!is_digits(iso, pos + 1, 2)) throw data_error("unparseable timestamp offset: '" + iso + "'");
    int oh = to_int(iso, pos + 1, 2);
    std::size_t p2 = pos + 3;
    if (p2 < iso.size() && iso[p2] == ':') ++p2;
    if (!is_digits(iso, p2, 2)) throw data_error("unparseable timestamp offset: '" + iso + "'");
    int om = to_int(iso, p2, 2);
    offset_micros = (oh * 60ll + om) * kMicrosPerMinute;
    if (c == '-') offset_micros = -offset_micros;
    pos = p2 + 2;
  } else {
    throw data_error("timestamp missing UTC offset: '" + iso + "'");
  }
  if (pos != iso.size()) throw data_error("trailing characters in timestamp: '" + iso + "'");
  if (hh > 23 || mm > 59 || ss > 60) throw data_error("invalid time of day in timestamp: '" + iso + "'");

  std::int64_t local = static_cast<std::int64_t>(date.days) * kMicrosPerDay +
                       ((hh * 60ll + mm) * 60ll + ss) * kMicrosPerSecond + frac_micros;
  return Timestamp{local - offset_micros};
}

Date Timestamp::utc_date() const {
  std::int64_t d = micros / kMicrosPerDay;
  if (micros < 0 && micros % kMicrosPerDay != 0) --d;
  return Date{static_cast<std::int32_t>(d)};
}

std::int64_t Timestamp::micros_of_day() const {
  std::int64_t rem = micros % kMicrosPerDay;
  return rem < 0 ? rem + kMicrosPerDay : rem;
}

std::string Timestamp::to_string() const {
  Date d = utc_date();
  std::int64_t t = micros_of_day();
  int hh = static_cast<int>(t / (3600 * kMicrosPerSecond));
  int mm = static_cast<int>((t / kMicrosPerMinute) % 60);
  int ss = static_cast<int>((t / kMicrosPerSecond) % 60);
  int us = static_cast<int>(t % kMicrosPerSecond);
  char buf[48];
  if (us != 0)
    std::snprintf(buf, sizeof(buf), "%sT%02d:%02d:%02d.%06dZ", d.to_string().c_str(), hh, mm, ss, us);
  else
    std::snprintf(buf, sizeof(buf), "%sT%02d:%02d:%02dZ", d.to_string().c_str(), hh, mm, ss);
  return buf;
}

std::int64_t parse_time_of_day(const std::string& hhmm) {
  if (hhmm.size() < 5 || hhmm[2] != ':' || !is_digits(hhmm, 0, 2) || !is_digits(hhmm, 3, 2))
    throw data_error("unparseable time of day: '" + hhmm + "'");
  int hh = to_int(hhmm, 0, 2), mm = to_int(hhmm, 3, 2), ss = 0;
  if (hhmm.size() == 8 && hhmm[5] == ':' && is_digits(hhmm, 6, 2))
    ss = to_int(hhmm, 6, 2);
  else if (hhmm.size() != 5)
    throw data_error("unparseable time of day: '" + hhmm + "'");
  if (hh > 24 || mm > 59 || ss > 59) throw data_error("invalid time of day: '" + hhmm + "'");
  return ((hh * 60ll + mm) * 60ll + ss) * kMicrosPerSecond;
}

std::string format_time_of_day(std::int64_t micros) {
  int hh = static_cast<int>(micros / (3600 * kMicrosPerSecond));
  int mm = static_cast<int>((micros / kMicrosPerMinute) % 60);
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d:%02d", hh, mm);
  return buf;
}

}  // namespace panelvar
