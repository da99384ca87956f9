#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "panelvar/commands.hpp"
#include "panelvar/common.hpp"

using namespace panelvar;

int main(int argc, char** argv) {
  CLI::App app{"Semi-parametric commodity VaR toolkit: panel quantile regression on realized and option-implied "
               "volatility"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file; command-line flags override config keys");

  IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand("ingest-ticks", "Ticks -> 5-minute bars, open-close returns, realized vol");
  ingest_cmd->add_option("--ticks", ingest.ticks_path, "Tick CSV (instrument,timestamp,price)")->required();
  ingest_cmd->add_option("--calendar", ingest.calendar_path, "Trading-calendar config file");
  ingest_cmd->add_option("--interval", ingest.interval_minutes, "Bar interval in minutes")->default_val(5);
  ingest_cmd->add_option("--out", ingest.out_dir, "Output directory")->required();

  ParseIndexOptions parse_index;
  auto* pi_cmd = app.add_subcommand("parse-index", "Published volatility-index CSVs -> daily volatility series");
  pi_cmd->add_option("--csv", parse_index.csv_specs, "INSTRUMENT=path, repeatable")->required();
  pi_cmd->add_option("--out", parse_index.out_dir, "Output directory")->required();

  EstimateOptions estimate;
  auto* est_cmd = app.add_subcommand("estimate", "Fit panel quantile regressions and emit estimate tables");
  auto add_estimate_inputs = [](CLI::App* cmd, EstimateOptions& opt) {
    cmd->add_option("--returns", opt.returns_path, "Returns CSV (instrument,date,value)")->required();
    cmd->add_option("--rv", opt.rv_path, "Realized-volatility CSV");
    cmd->add_option("--index", opt.index_path, "Daily implied-volatility CSV");
    cmd->add_option("--model", opt.model, "rv | index | both")->default_val("rv");
    cmd->add_option("--taus", opt.taus, "Quantile grid")->delimiter(',');
    cmd->add_option("--split", opt.split, "Sub-sample boundary DATE:DATE (pre ends, post starts)");
    cmd->add_option("-B,--replicates", opt.replicates, "Bootstrap replicates")->default_val(1000);
    cmd->add_option("--seed", opt.seed, "Random seed")->default_val(0);
    cmd->add_option("--block-length", opt.block_length, "Bootstrap block length in days")->default_val(1);
    cmd->add_option("--confidence", opt.confidence_level, "Confidence level")->default_val(0.95);
    cmd->add_option("--threads", opt.threads, "Worker threads (0: auto)")->default_val(0);
    cmd->add_option("--out", opt.out_dir, "Output directory")->required();
  };
  add_estimate_inputs(est_cmd, estimate);

  BootstrapOptions bootstrap;
  auto* boot_cmd = app.add_subcommand("bootstrap", "Bootstrap inference report for one model and sample");
  add_estimate_inputs(boot_cmd, bootstrap.base);
  boot_cmd->add_option("--sample", bootstrap.sample, "full | pre | post")->default_val("full");

  ForecastOptions forecast;
  auto* fc_cmd = app.add_subcommand("forecast", "Next-day VaR from fitted estimates");
  fc_cmd->add_option("--estimates", forecast.estimates_paths, "estimates_<model>.json artifacts, repeatable")
      ->required();
  fc_cmd->add_option("--rv", forecast.rv_path, "Realized-volatility CSV");
  fc_cmd->add_option("--index", forecast.index_path, "Daily implied-volatility CSV");
  fc_cmd->add_flag("--rearrange", forecast.rearrange, "Monotone rearrangement across the tau grid");
  fc_cmd->add_flag("--parametric,!--no-parametric", forecast.parametric, "Gaussian-benchmark rows (default on)");
  fc_cmd->add_option("--out", forecast.out_dir, "Output directory")->required();

  ReportOptions report;
  auto* rep_cmd = app.add_subcommand("report", "Figure-data files from estimate artifacts");
  rep_cmd->add_option("--estimates-dir", report.estimates_dir, "Directory holding estimates_<model>.json")
      ->required();
  rep_cmd->add_option("--models", report.models, "Models whose artifacts must be present")->delimiter(',');
  rep_cmd->add_option("--out", report.out_dir, "Output directory")->required();

  SimulateOptions simulate;
  std::string sim_law = "normal";
  std::string sim_start = "2007-05-10";
  std::vector<double> sim_fixed_effects;
  auto* sim_cmd = app.add_subcommand("simulate", "Synthetic location-scale panel in the pipeline CSV schema");
  sim_cmd->add_option("--assets", simulate.spec.n_assets, "Number of assets")->default_val(3);
  sim_cmd->add_option("--days", simulate.spec.n_days, "Number of panel days")->default_val(500);
  sim_cmd->add_option("--law", sim_law, "normal | t | uniform")->default_val("normal");
  sim_cmd->add_option("--dof", simulate.spec.t_dof, "Student-t degrees of freedom")->default_val(4.0);
  sim_cmd->add_option("--seed", simulate.spec.seed, "Random seed")->default_val(1);
  sim_cmd->add_option("--vol-mean", simulate.spec.log_vol_mean, "Mean of log volatility")->default_val(-4.3);
  sim_cmd->add_option("--vol-persistence", simulate.spec.persistence, "AR(1) coefficient")->default_val(0.97);
  sim_cmd->add_option("--vol-scale", simulate.spec.innovation_scale, "Log-vol innovation scale")->default_val(0.25);
  sim_cmd->add_option("--fixed-effects", sim_fixed_effects, "Per-asset intercepts")->delimiter(',');
  sim_cmd->add_flag("--with-index", simulate.spec.with_index, "Also emit a synthetic implied-vol regressor");
  sim_cmd->add_option("--index-noise", simulate.spec.index_noise, "Noise scale of the index proxy")
      ->default_val(0.25);
  sim_cmd->add_option("--start-date", sim_start, "First calendar date")->default_val("2007-05-10");
  sim_cmd->add_option("--out", simulate.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // 1: usage error
  }

  try {
    if (ingest_cmd->parsed()) cmd_ingest(ingest);
    if (pi_cmd->parsed()) cmd_parse_index(parse_index);
    if (est_cmd->parsed()) cmd_estimate(estimate);
    if (boot_cmd->parsed()) cmd_bootstrap(bootstrap);
    if (fc_cmd->parsed()) cmd_forecast(forecast);
    if (rep_cmd->parsed()) cmd_report(report);
    if (sim_cmd->parsed()) {
      simulate.spec.law = innovation_law_from_string(sim_law);
      simulate.spec.start_date = Date::parse(sim_start);
      simulate.spec.fixed_effects = sim_fixed_effects;
      cmd_simulate(simulate);
    }
  } catch (const data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
