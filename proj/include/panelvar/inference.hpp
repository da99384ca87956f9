#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "panelvar/panel.hpp"
#include "panelvar/quantreg.hpp"

namespace panelvar {

// Cross-sectionally paired day resampling: each bootstrap draw picks whole
// trading dates with replacement, carrying every asset's observations for
// that date. block_length > 1 draws blocks of consecutive dates instead.
struct BootstrapConfig {
  int replicates = 1000;
  std::uint64_t seed = 0;
  int block_length = 1;
  double confidence_level = 0.95;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct ParamInference {
  std::string name;  // "beta_<column>" or "alpha_<asset>"
  double estimate = 0.0;
  std::optional<double> std_error;  // missing when all replicates agree
  std::optional<double> t_stat;     // estimate / std_error
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct InferenceReport {
  double tau = 0.0;
  int replicates = 0;
  int redraws = 0;  // replicates that had to be redrawn after a solve failure
  std::vector<ParamInference> params;
  Eigen::MatrixXd replicate_estimates;  // replicates x params, slot order
};

InferenceReport bootstrap_fit(const PanelDataset& data, double tau, const BootstrapConfig& config,
                              const FitOptions& fit_options = {});

// SE / t / percentile-CI arithmetic on an externally supplied replicate
// matrix (row = replicate). Exposed for direct testing.
std::vector<ParamInference> bootstrap_statistics(const std::vector<std::string>& names,
                                                 const Eigen::VectorXd& point_estimates,
                                                 const Eigen::MatrixXd& replicates, double confidence_level);

// Linear-interpolation (type 7) empirical quantile of a sample.
double empirical_quantile(std::vector<double> sample, double p);

struct Band {
  std::string param;
  std::vector<double> taus;
  std::vector<double> point;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::uint8_t> empty;  // set by intersections where lo > hi
};

// Per-parameter bands across a tau grid; reports must share a parameter set.
std::vector<Band> confidence_bands(std::span<const InferenceReport> reports);

// Pointwise max of lowers / min of uppers; flags empty points.
Band intersect_bands(std::span<const Band> bands);

nlohmann::ordered_json inference_to_json(const InferenceReport& report);

}  // namespace panelvar
