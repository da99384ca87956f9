#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "panelvar/inference.hpp"
#include "panelvar/marketdata.hpp"
#include "panelvar/quantreg.hpp"

namespace panelvar {

// Everything `estimate` produces for one model specification.
struct SampleEstimates {
  std::string sample;  // "full" | "pre" | "post"
  QuantileCurve curve;
  std::vector<InferenceReport> inference;  // one per tau, grid order
  std::map<std::string, std::vector<QuantileFit>> univariate;  // asset -> per-tau fits
};

struct ModelEstimates {
  std::string model;  // "rv" | "index" | "both"
  std::vector<std::string> assets;
  std::vector<std::string> columns;
  std::vector<double> taus;
  std::vector<SampleEstimates> samples;  // "full" first
};

// "estimate (t)" cell, estimate at 3 decimals and t at 2, as in the printed
// tables; a missing t renders as NA.
std::string estimate_cell(double estimate, const std::optional<double>& t_stat);

std::string tau_percent_label(double tau);

// Slope rows only (main-table layout): sample,param,<tau...>.
std::string table_main_csv(const ModelEstimates& est);

// Slopes plus every fixed effect (appendix layout).
std::string table_full_csv(const ModelEstimates& est);

// Inference report grid for one sample: rows = params, columns = tau grid.
std::string inference_table_csv(const std::vector<double>& taus, std::span<const InferenceReport> reports);

nlohmann::ordered_json estimates_to_json(const ModelEstimates& est);
ModelEstimates estimates_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json inference_report_from_parts(const InferenceReport& report);
InferenceReport inference_from_json(const nlohmann::ordered_json& j);

// Per-parameter confidence band pulled out of a sample's inference grid.
Band band_for_param(const std::vector<double>& taus, std::span<const InferenceReport> reports,
                    const std::string& param);

// Figure data emitters (CSV, plot-ready).
std::string fig_coefficients_csv(const ModelEstimates& rv);
std::string fig_normal_overlay_csv(const ModelEstimates& rv);
std::string fig_model_comparison_csv(const ModelEstimates& rv, const ModelEstimates& index,
                                     const ModelEstimates& both);
std::string fig_normal_overlay_models_csv(const ModelEstimates& rv, const ModelEstimates& index);

// Descriptive-statistics table (returns / realized-volatility / index blocks).
struct StatsRow {
  std::string series;  // "returns" | "rv" | "vol_daily"
  std::string instrument;
  StatsSummary stats;
};
std::string descriptive_stats_csv(std::span<const StatsRow> rows);

}  // namespace panelvar
