#pragma once

#include <cstdint>
#include <set>
#include <string>

#include "panelvar/dates.hpp"

namespace panelvar {

// Regular-session definition plus an explicit exclusion list (holidays).
// Session times are UTC clock times; tick timestamps are converted to UTC
// before session filtering.
struct TradingCalendar {
  std::set<int> included_weekdays = {0, 1, 2, 3, 4};  // Monday..Friday
  std::set<Date> excluded_dates;
  std::int64_t session_open = parse_time_of_day("09:30");
  std::int64_t session_close = parse_time_of_day("16:00");

  void validate() const;
  bool is_trading_day(Date d) const;
  std::int64_t session_length() const { return session_close - session_open; }

  // Key-value config: `session_open = HH:MM`, `session_close = HH:MM`,
  // optional `weekdays = Mon,Tue,...`; any bare ISO date line (or
  // `exclude = DATE`) joins the exclusion list. '#' starts a comment.
  static TradingCalendar load(const std::string& path);
  static TradingCalendar parse(const std::string& text);
};

}  // namespace panelvar
