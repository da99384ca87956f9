#include "panelvar/calendar.hpp"

#include <array>
#include <sstream>

#include "panelvar/common.hpp"
#include "panelvar/csv.hpp"

namespace panelvar {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int weekday_index(const std::string& name) {
  static const std::array<std::string, 7> names = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};
  for (int i = 0; i < 7; ++i)
    if (name == names[i]) return i;
  throw data_error("unknown weekday name: '" + name + "'");
}

}  // namespace

void TradingCalendar::validate() const {
  if (session_open >= session_close) throw data_error("calendar: session_open must precede session_close");
  if (included_weekdays.empty()) throw data_error("calendar: no weekdays included");
}

bool TradingCalendar::is_trading_day(Date d) const {
  return included_weekdays.count(d.weekday()) > 0 && excluded_dates.count(d) == 0;
}

TradingCalendar TradingCalendar::parse(const std::string& text) {
  TradingCalendar cal;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    try {
      if (eq == std::string::npos) {
        cal.excluded_dates.insert(Date::parse(line));
        continue;
      }
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key == "session_open") {
        cal.session_open = parse_time_of_day(value);
      } else if (key == "session_close") {
        cal.session_close = parse_time_of_day(value);
      } else if (key == "exclude") {
        cal.excluded_dates.insert(Date::parse(value));
      } else if (key == "weekdays") {
        cal.included_weekdays.clear();
        std::istringstream days(value);
        std::string day;
        while (std::getline(days, day, ',')) cal.included_weekdays.insert(weekday_index(trim(day)));
      } else {
        throw data_error("unknown calendar key: '" + key + "'");
      }
    } catch (const data_error& e) {
      throw data_error("calendar line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cal.validate();
  return cal;
}

TradingCalendar TradingCalendar::load(const std::string& path) { return parse(read_text_file(path)); }

}  // namespace panelvar
