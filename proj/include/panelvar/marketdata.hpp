#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "panelvar/calendar.hpp"
#include "panelvar/dates.hpp"

namespace panelvar {

struct TickRecord {
  std::string instrument;
  Timestamp ts;
  double price = 0.0;
};

// One session's last-tick grid for one instrument. Grid points with no trade
// at or before them are simply absent, so the first point of a day can start
// anywhere in the session and the per-day point count varies.
struct BarSeries {
  std::string instrument;
  Date session_date;
  std::vector<Timestamp> bar_times;
  std::vector<double> log_prices;
};

struct ReturnSeries {
  std::string instrument;
  std::vector<Date> dates;
  std::vector<double> returns;  // within-session open-close log returns
};

struct RealizedVolSeries {
  std::string instrument;
  std::vector<Date> dates;
  std::vector<double> rv_sqrt;
  std::vector<std::uint8_t> zero_flag;  // exact-zero RV days, kept but flagged
};

// Generic instrument/date/value transport shared by the CSV surfaces and the
// panel builder.
struct DatedSeries {
  std::string instrument;
  std::vector<Date> dates;
  std::vector<double> values;
};

struct StatsSummary {
  double mean = 0.0;
  double st_dev = 0.0;
  std::optional<double> skewness;          // missing for constant series
  std::optional<double> excess_kurtosis;   // kurtosis - 3, missing for constant series
  double median = 0.0;
  double minimum = 0.0;
  double maximum = 0.0;
};

struct IngestCounters {
  std::size_t rejected_ticks = 0;   // non-positive price
  std::size_t filtered_ticks = 0;   // outside session or calendar
  std::size_t dropped_days = 0;     // empty session or too few grid points
  std::size_t malformed_rows = 0;
  std::vector<std::string> warnings;
};

std::vector<BarSeries> build_bars(std::vector<TickRecord> ticks, const TradingCalendar& calendar,
                                  std::int64_t interval_micros, IngestCounters* counters = nullptr);

std::vector<ReturnSeries> open_close_returns(std::span<const BarSeries> bars, IngestCounters* counters = nullptr);

std::vector<RealizedVolSeries> realized_volatility(std::span<const BarSeries> bars,
                                                   IngestCounters* counters = nullptr);

StatsSummary descriptive_stats(std::span<const double> x);

// pre = dates <= boundary, post = the rest. Works on any series type with
// parallel `dates` / value vectors.
template <class Series>
std::pair<Series, Series> split_sample(const Series& s, Date boundary);

// Pre/post around an excluded gap (boundary_pre inclusive, boundary_post
// inclusive on the other side); dates strictly between the two are dropped.
template <class Series>
std::pair<Series, Series> split_sample_range(const Series& s, Date boundary_pre, Date boundary_post);

DatedSeries to_dated(const ReturnSeries& s);
DatedSeries to_dated(const RealizedVolSeries& s);

// --- CSV surfaces ------------------------------------------------------

// `instrument,timestamp,price` with ISO-8601 offset timestamps. Malformed
// rows raise data_error naming the row; non-positive prices are counted and
// skipped.
std::vector<TickRecord> read_ticks_csv(const std::string& path, IngestCounters* counters = nullptr);

// `instrument,date,value`, floats at 10 significant digits.
void write_series_csv(const std::string& path, std::span<const DatedSeries> series);
std::vector<DatedSeries> read_series_csv(const std::string& path);

// Bars use the same three-column layout with a full timestamp in the date
// column.
void write_bars_csv(const std::string& path, std::span<const BarSeries> bars);

}  // namespace panelvar
