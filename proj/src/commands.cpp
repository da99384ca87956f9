#include "panelvar/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <set>

#include "nlohmann/json.hpp"
#include "panelvar/common.hpp"
#include "panelvar/csv.hpp"
#include "panelvar/distributions.hpp"
#include "panelvar/implied.hpp"
#include "panelvar/inference.hpp"
#include "panelvar/marketdata.hpp"
#include "panelvar/panel.hpp"
#include "panelvar/quantreg.hpp"
#include "panelvar/tables.hpp"
#include "panelvar/varengine.hpp"

namespace fs = std::filesystem;

namespace panelvar {

void ensure_out_dir(const std::string& out_dir) {
  if (out_dir.empty()) throw data_error("output directory not set");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw data_error("cannot create output directory " + out_dir + ": " + ec.message());
}

std::pair<Date, Date> parse_split(const std::string& spec) {
  std::size_t colon = spec.find(':');
  if (colon == std::string::npos) throw data_error("split must be DATE:DATE, got '" + spec + "'");
  Date pre = Date::parse(spec.substr(0, colon));
  Date post = Date::parse(spec.substr(colon + 1));
  if (!(pre < post)) throw data_error("split: first date must precede the second");
  return {pre, post};
}

namespace {

using KV = std::vector<std::pair<std::string, std::string>>;

void echo_config(const std::string& out_dir, const std::string& command, const KV& kv) {
  std::string text = "command = " + command + "\n";
  for (const auto& [k, v] : kv) text += k + " = " + v + "\n";
  write_text_file((fs::path(out_dir) / "run_config.txt").string(), text);
}

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string taus_to_string(const std::vector<double>& taus) {
  std::string s;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (i) s += ",";
    s += format_sig(taus[i]);
  }
  return s;
}

void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace

void cmd_ingest(const IngestOptions& opt) {
  ensure_out_dir(opt.out_dir);
  TradingCalendar calendar = opt.calendar_path.empty() ? TradingCalendar{} : TradingCalendar::load(opt.calendar_path);
  IngestCounters counters;
  std::vector<TickRecord> ticks = read_ticks_csv(opt.ticks_path, &counters);
  auto bars = build_bars(std::move(ticks), calendar, opt.interval_minutes * kMicrosPerMinute, &counters);
  auto returns = open_close_returns(bars, &counters);
  auto rv = realized_volatility(bars, &counters);

  write_bars_csv(join_path(opt.out_dir, "bars.csv"), bars);
  std::vector<DatedSeries> ret_dated, rv_dated;
  for (const auto& s : returns) ret_dated.push_back(to_dated(s));
  for (const auto& s : rv) rv_dated.push_back(to_dated(s));
  write_series_csv(join_path(opt.out_dir, "returns.csv"), ret_dated);
  write_series_csv(join_path(opt.out_dir, "rv.csv"), rv_dated);

  std::vector<StatsRow> stats;
  for (const auto& s : ret_dated)
    if (s.values.size() >= 2) stats.push_back({"returns", s.instrument, descriptive_stats(s.values)});
  for (const auto& s : rv_dated)
    if (s.values.size() >= 2) stats.push_back({"rv", s.instrument, descriptive_stats(s.values)});
  write_text_file(join_path(opt.out_dir, "descriptive_stats.csv"), descriptive_stats_csv(stats));

  echo_config(opt.out_dir, "ingest-ticks",
              {{"ticks", opt.ticks_path},
               {"calendar", opt.calendar_path.empty() ? "<default>" : opt.calendar_path},
               {"interval_minutes", std::to_string(opt.interval_minutes)},
               {"out", opt.out_dir}});

  std::size_t bar_days = bars.size();
  std::cerr << "ingest-ticks: " << bar_days << " instrument-days, " << counters.rejected_ticks
            << " rejected ticks, " << counters.filtered_ticks << " filtered ticks, " << counters.dropped_days
            << " dropped days\n";
  for (const auto& wmsg : counters.warnings) std::cerr << "warning: " << wmsg << "\n";
}

void cmd_parse_index(const ParseIndexOptions& opt) {
  ensure_out_dir(opt.out_dir);
  if (opt.csv_specs.empty()) throw data_error("parse-index: no input files (use INSTRUMENT=path)");
  std::vector<DatedSeries> series;
  std::vector<StatsRow> stats;
  std::size_t dropped = 0;
  for (const auto& spec : opt.csv_specs) {
    std::size_t eq = spec.find('=');
    if (eq == std::string::npos) throw data_error("parse-index: expected INSTRUMENT=path, got '" + spec + "'");
    std::string instrument = spec.substr(0, eq);
    std::string path = spec.substr(eq + 1);
    VolIndexSeries parsed = parse_index_csv(path, instrument);
    dropped += parsed.missing_dropped;
    if (parsed.resorted) std::cerr << "warning: " << path << ": rows were out of order and have been re-sorted\n";
    series.push_back(DatedSeries{parsed.instrument, parsed.dates, parsed.vol_daily});
    if (parsed.vol_daily.size() >= 2)
      stats.push_back({"vol_daily", parsed.instrument, descriptive_stats(parsed.vol_daily)});
  }
  std::sort(series.begin(), series.end(),
            [](const DatedSeries& a, const DatedSeries& b) { return a.instrument < b.instrument; });
  write_series_csv(join_path(opt.out_dir, "volindex.csv"), series);
  write_text_file(join_path(opt.out_dir, "stats_index.csv"), descriptive_stats_csv(stats));

  KV kv;
  for (const auto& spec : opt.csv_specs) kv.push_back({"csv", spec});
  kv.push_back({"out", opt.out_dir});
  echo_config(opt.out_dir, "parse-index", kv);
  std::size_t rows = 0;
  for (const auto& s : series) rows += s.dates.size();
  std::cerr << "parse-index: " << rows << " rows across " << series.size() << " instruments, " << dropped
            << " missing values dropped\n";
}

namespace {

struct ModelInputs {
  std::vector<DatedSeries> returns;
  std::vector<std::pair<std::string, std::vector<DatedSeries>>> regressors;
};

ModelInputs load_model_inputs(const EstimateOptions& opt) {
  if (opt.model != "rv" && opt.model != "index" && opt.model != "both")
    throw data_error("model must be rv, index or both (got '" + opt.model + "')");
  ModelInputs inputs;
  inputs.returns = read_series_csv(opt.returns_path);
  if (opt.model == "rv" || opt.model == "both")
    inputs.regressors.emplace_back("rv_sqrt", read_series_csv(opt.rv_path));
  if (opt.model == "index" || opt.model == "both") {
    if (opt.index_path.empty()) throw data_error("model '" + opt.model + "' requires --index");
    inputs.regressors.emplace_back("vol_daily", read_series_csv(opt.index_path));
  }
  return inputs;
}

std::string model_tag(const std::string& model) {
  if (model == "rv") return "RV";
  if (model == "index") return "INDEX";
  return "RV+INDEX";
}

ModelEstimates run_estimation(const EstimateOptions& opt) {
  ModelInputs inputs = load_model_inputs(opt);
  PanelDataset full = build_panel(inputs.returns, inputs.regressors);

  std::vector<std::pair<std::string, PanelDataset>> samples;
  samples.emplace_back("full", full);
  if (!opt.split.empty()) {
    auto [pre_date, post_date] = parse_split(opt.split);
    auto [pre, post] = full.split(pre_date, post_date);
    samples.emplace_back("pre", std::move(pre));
    samples.emplace_back("post", std::move(post));
  }

  BootstrapConfig cfg;
  cfg.replicates = opt.replicates;
  cfg.seed = opt.seed;
  cfg.block_length = opt.block_length;
  cfg.confidence_level = opt.confidence_level;
  cfg.threads = opt.threads;

  ModelEstimates est;
  est.model = opt.model;
  est.assets = full.assets;
  est.columns = full.columns;
  est.taus = opt.taus;
  for (auto& [label, panel] : samples) {
    SampleEstimates sample;
    sample.sample = label;
    sample.curve = fit_quantile_curve(panel, opt.taus);
    for (double tau : opt.taus) sample.inference.push_back(bootstrap_fit(panel, tau, cfg));
    for (std::size_t a = 0; a < panel.assets.size(); ++a) {
      std::vector<QuantileFit> fits;
      PanelDataset single = panel.select_asset(a);
      for (double tau : opt.taus) fits.push_back(fit_panel_qr(single, tau));
      sample.univariate[panel.assets[a]] = std::move(fits);
    }
    est.samples.push_back(std::move(sample));
  }
  return est;
}

KV estimate_kv(const EstimateOptions& opt) {
  return {{"returns", opt.returns_path},
          {"rv", opt.rv_path},
          {"index", opt.index_path.empty() ? "<none>" : opt.index_path},
          {"model", opt.model},
          {"taus", taus_to_string(opt.taus)},
          {"split", opt.split.empty() ? "<none>" : opt.split},
          {"replicates", std::to_string(opt.replicates)},
          {"seed", std::to_string(opt.seed)},
          {"block_length", std::to_string(opt.block_length)},
          {"confidence_level", format_sig(opt.confidence_level)},
          {"out", opt.out_dir}};
}

}  // namespace

void cmd_estimate(const EstimateOptions& opt) {
  ensure_out_dir(opt.out_dir);
  ModelEstimates est = run_estimation(opt);
  const std::string stem = "estimates_" + opt.model;
  write_text_file(join_path(opt.out_dir, stem + ".csv"), table_main_csv(est));
  write_text_file(join_path(opt.out_dir, stem + "_full.csv"), table_full_csv(est));
  write_json_file(join_path(opt.out_dir, stem + ".json"), estimates_to_json(est));
  echo_config(opt.out_dir, "estimate", estimate_kv(opt));

  std::size_t crossings = 0;
  for (const auto& s : est.samples) crossings += s.curve.crossing.pair_violations;
  std::cerr << "estimate: model " << opt.model << ", " << est.assets.size() << " assets, " << est.samples.size()
            << " samples, " << est.taus.size() << " quantiles, " << crossings
            << " quantile-crossing violations\n";
}

void cmd_bootstrap(const BootstrapOptions& opt) {
  ensure_out_dir(opt.base.out_dir);
  ModelInputs inputs = load_model_inputs(opt.base);
  PanelDataset panel = build_panel(inputs.returns, inputs.regressors);
  if (opt.sample != "full") {
    if (opt.base.split.empty()) throw data_error("bootstrap: sample '" + opt.sample + "' requires --split");
    auto [pre_date, post_date] = parse_split(opt.base.split);
    auto [pre, post] = panel.split(pre_date, post_date);
    if (opt.sample == "pre")
      panel = std::move(pre);
    else if (opt.sample == "post")
      panel = std::move(post);
    else
      throw data_error("bootstrap: sample must be full, pre or post");
  }

  BootstrapConfig cfg;
  cfg.replicates = opt.base.replicates;
  cfg.seed = opt.base.seed;
  cfg.block_length = opt.base.block_length;
  cfg.confidence_level = opt.base.confidence_level;
  cfg.threads = opt.base.threads;

  std::vector<InferenceReport> reports;
  for (double tau : opt.base.taus) reports.push_back(bootstrap_fit(panel, tau, cfg));

  const std::string stem = "inference_" + opt.base.model + "_" + opt.sample;
  write_text_file(join_path(opt.base.out_dir, stem + ".csv"), inference_table_csv(opt.base.taus, reports));
  nlohmann::ordered_json j;
  j["model"] = opt.base.model;
  j["sample"] = opt.sample;
  j["taus"] = opt.base.taus;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& rep : reports) arr.push_back(inference_to_json(rep));
  j["inference"] = std::move(arr);
  write_json_file(join_path(opt.base.out_dir, stem + ".json"), j);

  KV kv = estimate_kv(opt.base);
  kv.push_back({"sample", opt.sample});
  echo_config(opt.base.out_dir, "bootstrap", kv);
  std::cerr << "bootstrap: " << opt.base.replicates << " replicates x " << opt.base.taus.size() << " quantiles ("
            << opt.base.model << "/" << opt.sample << ")\n";
}

void cmd_forecast(const ForecastOptions& opt) {
  ensure_out_dir(opt.out_dir);
  if (opt.estimates_paths.empty()) throw data_error("forecast: no estimates artifacts given");

  std::vector<DatedSeries> rv_series, index_series;
  if (!opt.rv_path.empty()) rv_series = read_series_csv(opt.rv_path);
  if (!opt.index_path.empty()) index_series = read_series_csv(opt.index_path);
  auto series_for_column = [&](const std::string& column) -> const std::vector<DatedSeries>& {
    if (column == "rv_sqrt") {
      if (rv_series.empty()) throw data_error("forecast: column rv_sqrt requires --rv");
      return rv_series;
    }
    if (column == "vol_daily") {
      if (index_series.empty()) throw data_error("forecast: column vol_daily requires --index");
      return index_series;
    }
    throw data_error("forecast: unknown regressor column '" + column + "'");
  };
  auto find_series = [](const std::vector<DatedSeries>& v, const std::string& inst) -> const DatedSeries& {
    for (const auto& s : v)
      if (s.instrument == inst) return s;
    throw data_error("forecast: no series for instrument " + inst);
  };

  std::vector<VaRForecast> forecasts;
  bool parametric_done = false;
  for (const auto& path : opt.estimates_paths) {
    auto j = nlohmann::ordered_json::parse(read_text_file(path));
    ModelEstimates est = estimates_from_json(j);
    const SampleEstimates* full = nullptr;
    for (const auto& s : est.samples)
      if (s.sample == "full") full = &s;
    if (!full) throw data_error("forecast: artifact " + path + " has no full sample");

    for (const auto& asset : est.assets) {
      // Latest date carrying every regressor column for this asset.
      const DatedSeries& first = find_series(series_for_column(est.columns[0]), asset);
      if (first.dates.empty()) throw data_error("forecast: empty series for " + asset);
      std::ptrdiff_t pick = -1;
      for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(first.dates.size()) - 1; i >= 0 && pick < 0; --i) {
        bool everywhere = true;
        for (std::size_t c = 1; c < est.columns.size() && everywhere; ++c) {
          const DatedSeries& other = find_series(series_for_column(est.columns[c]), asset);
          everywhere = std::binary_search(other.dates.begin(), other.dates.end(), first.dates[i]);
        }
        if (everywhere) pick = i;
      }
      if (pick < 0) throw data_error("forecast: no complete regressor row for " + asset);
      const Date latest = first.dates[static_cast<std::size_t>(pick)];
      const Date target = latest.next_weekday();
      Eigen::VectorXd x(est.columns.size());
      for (std::size_t c = 0; c < est.columns.size(); ++c) {
        const DatedSeries& s = find_series(series_for_column(est.columns[c]), asset);
        auto it = std::lower_bound(s.dates.begin(), s.dates.end(), latest);
        x[static_cast<Eigen::Index>(c)] = s.values[static_cast<std::size_t>(it - s.dates.begin())];
      }
      std::vector<VaRForecast> curve;
      for (const auto& fit : full->curve.fits)
        curve.push_back(forecast_var(fit, x, asset, target, model_tag(est.model)));
      if (opt.rearrange) {
        std::vector<double> values;
        for (const auto& f : curve) values.push_back(f.value);
        values = rearrange(std::move(values));
        for (std::size_t k = 0; k < curve.size(); ++k) curve[k].value = values[k];
      }
      forecasts.insert(forecasts.end(), curve.begin(), curve.end());

      if (opt.parametric && !parametric_done && !rv_series.empty()) {
        const DatedSeries& rv = find_series(rv_series, asset);
        double sigma = rv.values.back();
        for (double tau : est.taus)
          forecasts.push_back(VaRForecast{asset, rv.dates.back().next_weekday(), tau, "parametric",
                                          parametric_var(tau, sigma)});
      }
    }
    if (opt.parametric && !rv_series.empty()) parametric_done = true;
  }

  CsvWriter w;
  w.row({"asset", "date", "tau", "model", "value"});
  for (const auto& f : forecasts)
    w.row({f.asset, f.date.to_string(), format_sig(f.tau), f.model, format_sig(f.value)});
  w.save(join_path(opt.out_dir, "forecasts.csv"));

  KV kv;
  for (const auto& p : opt.estimates_paths) kv.push_back({"estimates", p});
  kv.push_back({"rv", opt.rv_path.empty() ? "<none>" : opt.rv_path});
  kv.push_back({"index", opt.index_path.empty() ? "<none>" : opt.index_path});
  kv.push_back({"rearrange", opt.rearrange ? "true" : "false"});
  kv.push_back({"parametric", opt.parametric ? "true" : "false"});
  kv.push_back({"out", opt.out_dir});
  echo_config(opt.out_dir, "forecast", kv);
  std::cerr << "forecast: " << forecasts.size() << " rows\n";
}

void cmd_report(const ReportOptions& opt) {
  ensure_out_dir(opt.out_dir);
  std::map<std::string, ModelEstimates> loaded;
  for (const auto& model : opt.models) {
    std::string path = join_path(opt.estimates_dir, "estimates_" + model + ".json");
    if (!fs::exists(path)) throw data_error("report: missing upstream artifact " + path);
    loaded[model] = estimates_from_json(nlohmann::ordered_json::parse(read_text_file(path)));
  }
  std::size_t files = 0;
  if (loaded.count("rv")) {
    write_text_file(join_path(opt.out_dir, "fig_coefficients.csv"), fig_coefficients_csv(loaded.at("rv")));
    write_text_file(join_path(opt.out_dir, "fig_normal_overlay.csv"), fig_normal_overlay_csv(loaded.at("rv")));
    files += 2;
  }
  if (loaded.count("rv") && loaded.count("index") && loaded.count("both")) {
    write_text_file(join_path(opt.out_dir, "fig_model_comparison.csv"),
                    fig_model_comparison_csv(loaded.at("rv"), loaded.at("index"), loaded.at("both")));
    write_text_file(join_path(opt.out_dir, "fig_normal_overlay_models.csv"),
                    fig_normal_overlay_models_csv(loaded.at("rv"), loaded.at("index")));
    files += 2;
  }
  KV kv;
  kv.push_back({"estimates_dir", opt.estimates_dir});
  for (const auto& m : opt.models) kv.push_back({"model", m});
  kv.push_back({"out", opt.out_dir});
  echo_config(opt.out_dir, "report", kv);
  std::cerr << "report: " << files << " figure-data files\n";
}

void cmd_simulate(const SimulateOptions& opt) {
  ensure_out_dir(opt.out_dir);
  SynthPanel synth = generate_panel(opt.spec);
  write_series_csv(join_path(opt.out_dir, "returns.csv"), synth.returns);
  write_series_csv(join_path(opt.out_dir, "rv.csv"), synth.rv);
  if (!synth.index.empty()) write_series_csv(join_path(opt.out_dir, "volindex.csv"), synth.index);

  nlohmann::ordered_json truth;
  truth["law"] = to_string(synth.law);
  truth["t_dof"] = synth.t_dof;
  nlohmann::ordered_json fe;
  for (std::size_t a = 0; a < synth.panel.assets.size(); ++a) fe[synth.panel.assets[a]] = synth.fixed_effects[a];
  truth["fixed_effects"] = std::move(fe);
  truth["seed"] = opt.spec.seed;
  write_json_file(join_path(opt.out_dir, "truth.json"), truth);

  echo_config(opt.out_dir, "simulate",
              {{"assets", std::to_string(opt.spec.n_assets)},
               {"days", std::to_string(opt.spec.n_days)},
               {"law", to_string(opt.spec.law)},
               {"t_dof", format_sig(opt.spec.t_dof)},
               {"seed", std::to_string(opt.spec.seed)},
               {"log_vol_mean", format_sig(opt.spec.log_vol_mean)},
               {"persistence", format_sig(opt.spec.persistence)},
               {"innovation_scale", format_sig(opt.spec.innovation_scale)},
               {"with_index", opt.spec.with_index ? "true" : "false"},
               {"start_date", opt.spec.start_date.to_string()},
               {"out", opt.out_dir}});
  std::cerr << "simulate: " << opt.spec.n_assets << " assets x " << opt.spec.n_days << " days (law "
            << to_string(opt.spec.law) << ", seed " << opt.spec.seed << ")\n";
}

}  // namespace panelvar
