#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panelvar/synth.hpp"

namespace panelvar {

// Command bodies behind the CLI. Each writes its artifacts plus a
// run_config.txt echo of the effective options into the output directory and
// prints summary counts to stderr. Errors surface as data_error /
// numerical_error; the CLI maps them to exit codes.

struct IngestOptions {
  std::string ticks_path;
  std::string calendar_path;  // empty: built-in Mon-Fri 09:30-16:00, no holidays
  int interval_minutes = 5;
  std::string out_dir;
};
void cmd_ingest(const IngestOptions& opt);

struct ParseIndexOptions {
  std::vector<std::string> csv_specs;  // INSTRUMENT=path
  std::string out_dir;
};
void cmd_parse_index(const ParseIndexOptions& opt);

struct EstimateOptions {
  std::string returns_path;
  std::string rv_path;
  std::string index_path;
  std::string model = "rv";  // rv | index | both
  std::vector<double> taus = {0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95};
  std::string split;  // "DATE:DATE"; empty for full sample only
  int replicates = 1000;
  std::uint64_t seed = 0;
  int block_length = 1;
  double confidence_level = 0.95;
  int threads = 0;
  std::string out_dir;
};
void cmd_estimate(const EstimateOptions& opt);

struct BootstrapOptions {
  EstimateOptions base;        // inputs, model, taus, bootstrap config
  std::string sample = "full";  // full | pre | post
};
void cmd_bootstrap(const BootstrapOptions& opt);

struct ForecastOptions {
  std::vector<std::string> estimates_paths;  // estimates_<model>.json artifacts
  std::string rv_path;
  std::string index_path;
  bool rearrange = false;   // monotone rearrangement across the tau grid
  bool parametric = true;   // also emit gamma_tau * latest RV rows
  std::string out_dir;
};
void cmd_forecast(const ForecastOptions& opt);

struct ReportOptions {
  std::string estimates_dir;
  std::vector<std::string> models = {"rv"};  // artifacts required present
  std::string out_dir;
};
void cmd_report(const ReportOptions& opt);

struct SimulateOptions {
  SynthSpec spec;
  std::string out_dir;
};
void cmd_simulate(const SimulateOptions& opt);

// Shared helpers.
void ensure_out_dir(const std::string& out_dir);
std::pair<Date, Date> parse_split(const std::string& spec);

}  // namespace panelvar
