#include "panelvar/marketdata.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "panelvar/common.hpp"
#include "panelvar/csv.hpp"

namespace panelvar {

std::vector<BarSeries> build_bars(std::vector<TickRecord> ticks, const TradingCalendar& calendar,
                                  std::int64_t interval_micros, IngestCounters* counters) {
  calendar.validate();
  if (interval_micros <= 0) throw data_error("build_bars: interval must be positive");
  if (calendar.session_length() % interval_micros != 0)
    throw data_error("build_bars: interval does not divide the session length");

  IngestCounters local;
  IngestCounters& ctr = counters ? *counters : local;

  std::stable_sort(ticks.begin(), ticks.end(), [](const TickRecord& a, const TickRecord& b) {
    if (a.instrument != b.instrument) return a.instrument < b.instrument;
    return a.ts < b.ts;
  });

  const std::size_t grid_points = static_cast<std::size_t>(calendar.session_length() / interval_micros) + 1;

  std::vector<BarSeries> out;
  std::size_t i = 0;
  while (i < ticks.size()) {
    // One (instrument, session date) group per pass.
    const std::string& inst = ticks[i].instrument;
    Date day = ticks[i].ts.utc_date();
    std::size_t j = i;
    while (j < ticks.size() && ticks[j].instrument == inst && ticks[j].ts.utc_date() == day) ++j;

    if (!calendar.is_trading_day(day)) {
      ctr.filtered_ticks += j - i;
      i = j;
      continue;
    }

    BarSeries bars;
    bars.instrument = inst;
    bars.session_date = day;
    const std::int64_t day_start = static_cast<std::int64_t>(day.days) * kMicrosPerDay;

    std::size_t k = i;
    double last_price = 0.0;
    bool have_price = false;
    for (std::size_t g = 0; g < grid_points; ++g) {
      const std::int64_t grid_time = day_start + calendar.session_open + static_cast<std::int64_t>(g) * interval_micros;
      // Last tick at or before the grid time, session ticks only.
      while (k < j && ticks[k].ts.micros <= grid_time) {
        if (ticks[k].ts.micros_of_day() < calendar.session_open || ticks[k].ts.micros_of_day() > calendar.session_close) {
          ctr.filtered_ticks++;
        } else if (!(ticks[k].price > 0.0)) {
          ctr.rejected_ticks++;
        } else {
          last_price = ticks[k].price;
          have_price = true;
        }
        ++k;
      }
      if (have_price) {
        bars.bar_times.push_back(Timestamp{grid_time});
        bars.log_prices.push_back(std::log(last_price));
      }
    }
    // Ticks after the close of this day's session.
    while (k < j) {
      if (!(ticks[k].price > 0.0))
        ctr.rejected_ticks++;
      else
        ctr.filtered_ticks++;
      ++k;
    }

    if (bars.bar_times.empty()) {
      ctr.dropped_days++;
      ctr.warnings.push_back("no usable ticks for " + inst + " on " + day.to_string() + "; day dropped");
    } else {
      out.push_back(std::move(bars));
    }
    i = j;
  }
  return out;
}

namespace {

// Shared walk: per (instrument, day) reduce a bar series to one value.
template <class MakeSeries, class PerDay>
void per_instrument(std::span<const BarSeries> bars, MakeSeries&& make, PerDay&& per_day) {
  std::size_t i = 0;
  while (i < bars.size()) {
    std::size_t j = i;
    while (j < bars.size() && bars[j].instrument == bars[i].instrument) ++j;
    auto* series = make(bars[i].instrument);
    for (std::size_t k = i; k < j; ++k) per_day(series, bars[k]);
    i = j;
  }
}

}  // namespace

std::vector<ReturnSeries> open_close_returns(std::span<const BarSeries> bars, IngestCounters* counters) {
  IngestCounters local;
  IngestCounters& ctr = counters ? *counters : local;
  std::vector<ReturnSeries> out;
  per_instrument(
      bars,
      [&](const std::string& inst) {
        out.push_back(ReturnSeries{inst, {}, {}});
        return &out.back();
      },
      [&](ReturnSeries* s, const BarSeries& day) {
        if (day.log_prices.size() < 2) {
          ctr.dropped_days++;
          return;
        }
        s->dates.push_back(day.session_date);
        s->returns.push_back(day.log_prices.back() - day.log_prices.front());
      });
  return out;
}

std::vector<RealizedVolSeries> realized_volatility(std::span<const BarSeries> bars, IngestCounters* counters) {
  IngestCounters local;
  IngestCounters& ctr = counters ? *counters : local;
  std::vector<RealizedVolSeries> out;
  per_instrument(
      bars,
      [&](const std::string& inst) {
        out.push_back(RealizedVolSeries{inst, {}, {}, {}});
        return &out.back();
      },
      [&](RealizedVolSeries* s, const BarSeries& day) {
        if (day.log_prices.size() < 2) {
          ctr.dropped_days++;
          return;
        }
        double sum_sq = 0.0;
        for (std::size_t k = 1; k < day.log_prices.size(); ++k) {
          double d = day.log_prices[k] - day.log_prices[k - 1];
          sum_sq += d * d;
        }
        s->dates.push_back(day.session_date);
        s->rv_sqrt.push_back(std::sqrt(sum_sq));
        s->zero_flag.push_back(sum_sq == 0.0 ? 1 : 0);
      });
  return out;
}

StatsSummary descriptive_stats(std::span<const double> x) {
  if (x.size() < 2) throw data_error("descriptive_stats: need at least 2 observations");
  const double n = static_cast<double>(x.size());
  StatsSummary s;
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    double d = v - s.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  s.st_dev = std::sqrt(m2 / (n - 1.0));
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 > 0.0) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  s.minimum = sorted.front();
  s.maximum = sorted.back();
  std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

namespace {

void append_values(ReturnSeries& out, const ReturnSeries& in, std::size_t i) { out.returns.push_back(in.returns[i]); }
void append_values(RealizedVolSeries& out, const RealizedVolSeries& in, std::size_t i) {
  out.rv_sqrt.push_back(in.rv_sqrt[i]);
  out.zero_flag.push_back(in.zero_flag[i]);
}
void append_values(DatedSeries& out, const DatedSeries& in, std::size_t i) { out.values.push_back(in.values[i]); }

template <class Series>
Series subset_by(const Series& s, bool take_pre, Date lo, Date hi) {
  Series out;
  out.instrument = s.instrument;
  for (std::size_t i = 0; i < s.dates.size(); ++i) {
    bool keep = take_pre ? s.dates[i] <= lo : s.dates[i] >= hi;
    if (!keep) continue;
    out.dates.push_back(s.dates[i]);
    append_values(out, s, i);
  }
  return out;
}

}  // namespace

template <class Series>
std::pair<Series, Series> split_sample(const Series& s, Date boundary) {
  return {subset_by(s, true, boundary, boundary), subset_by(s, false, boundary, Date{boundary.days + 1})};
}

template <class Series>
std::pair<Series, Series> split_sample_range(const Series& s, Date boundary_pre, Date boundary_post) {
  if (boundary_post <= boundary_pre) throw data_error("split: post boundary must follow pre boundary");
  return {subset_by(s, true, boundary_pre, boundary_pre), subset_by(s, false, boundary_pre, boundary_post)};
}

template std::pair<ReturnSeries, ReturnSeries> split_sample(const ReturnSeries&, Date);
template std::pair<RealizedVolSeries, RealizedVolSeries> split_sample(const RealizedVolSeries&, Date);
template std::pair<DatedSeries, DatedSeries> split_sample(const DatedSeries&, Date);
template std::pair<ReturnSeries, ReturnSeries> split_sample_range(const ReturnSeries&, Date, Date);
template std::pair<RealizedVolSeries, RealizedVolSeries> split_sample_range(const RealizedVolSeries&, Date, Date);
template std::pair<DatedSeries, DatedSeries> split_sample_range(const DatedSeries&, Date, Date);

DatedSeries to_dated(const ReturnSeries& s) { return DatedSeries{s.instrument, s.dates, s.returns}; }
DatedSeries to_dated(const RealizedVolSeries& s) { return DatedSeries{s.instrument, s.dates, s.rv_sqrt}; }

std::vector<TickRecord> read_ticks_csv(const std::string& path, IngestCounters* counters) {
  auto rows = read_csv(path);
  if (rows.empty() || rows[0] != std::vector<std::string>{"instrument", "timestamp", "price"})
    throw data_error(path + ": expected header 'instrument,timestamp,price'");
  std::vector<TickRecord> ticks;
  ticks.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 3) throw data_error(path + " row " + std::to_string(r + 1) + ": expected 3 fields");
    try {
      TickRecord t;
      t.instrument = row[0];
      t.ts = Timestamp::parse(row[1]);
      std::size_t used = 0;
      t.price = std::stod(row[2], &used);
      if (used != row[2].size()) throw data_error("trailing characters in price '" + row[2] + "'");
      if (!(t.price > 0.0)) {
        if (counters) counters->rejected_ticks++;
        continue;
      }
      ticks.push_back(std::move(t));
    } catch (const std::out_of_range&) {
      throw data_error(path + " row " + std::to_string(r + 1) + ": price out of range '" + row[2] + "'");
    } catch (const std::invalid_argument&) {
      throw data_error(path + " row " + std::to_string(r + 1) + ": unparseable price '" + row[2] + "'");
    } catch (const data_error& e) {
      throw data_error(path + " row " + std::to_string(r + 1) + ": " + e.what());
    }
  }
  return ticks;
}

void write_series_csv(const std::string& path, std::span<const DatedSeries> series) {
  CsvWriter w;
  w.row({"instrument", "date", "value"});
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.dates.size(); ++i)
      w.row({s.instrument, s.dates[i].to_string(), format_sig(s.values[i])});
  w.save(path);
}

std::vector<DatedSeries> read_series_csv(const std::string& path) {
  auto rows = read_csv(path);
  if (rows.empty() || rows[0] != std::vector<std::string>{"instrument", "date", "value"})
    throw data_error(path + ": expected header 'instrument,date,value'");
  std::map<std::string, DatedSeries> by_inst;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 3) throw data_error(path + " row " + std::to_string(r + 1) + ": expected 3 fields");
    try {
      auto& s = by_inst[row[0]];
      s.instrument = row[0];
      s.dates.push_back(Date::parse(row[1]));
      std::size_t used = 0;
      s.values.push_back(std::stod(row[2], &used));
      if (used != row[2].size()) throw data_error("trailing characters in value");
    } catch (const std::invalid_argument&) {
      throw data_error(path + " row " + std::to_string(r + 1) + ": unparseable value '" + row[2] + "'");
    } catch (const std::out_of_range&) {
      throw data_error(path + " row " + std::to_string(r + 1) + ": value out of range '" + row[2] + "'");
    } catch (const data_error& e) {
      throw data_error(path + " row " + std::to_string(r + 1) + ": " + e.what());
    }
  }
  std::vector<DatedSeries> out;
  out.reserve(by_inst.size());
  for (auto& [name, s] : by_inst) {
    for (std::size_t i = 1; i < s.dates.size(); ++i)
      if (!(s.dates[i - 1] < s.dates[i]))
        throw data_error(path + ": dates not strictly increasing for instrument " + name);
    out.push_back(std::move(s));
  }
  return out;
}

void write_bars_csv(const std::string& path, std::span<const BarSeries> bars) {
  CsvWriter w;
  w.row({"instrument", "date", "value"});
  for (const auto& b : bars)
    for (std::size_t i = 0; i < b.bar_times.size(); ++i)
      w.row({b.instrument, b.bar_times[i].to_string(), format_sig(b.log_prices[i])});
  w.save(path);
}

}  // namespace panelvar
