#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "panelvar/dates.hpp"
#include "panelvar/distributions.hpp"
#include "panelvar/marketdata.hpp"
#include "panelvar/quantreg.hpp"

namespace panelvar {

// gamma_tau * sigma, the Gaussian benchmark VaR.
double parametric_var(double tau, double sigma);

struct VaRForecast {
  std::string asset;
  Date date;  // forecast target date (t+1)
  double tau = 0.0;
  std::string model;  // RV | INDEX | RV+INDEX | parametric
  double value = 0.0;
};

// alpha_hat(asset) + x_latest' beta_hat.
VaRForecast forecast_var(const QuantileFit& fit, const Eigen::VectorXd& x_latest, const std::string& asset,
                         Date target_date, const std::string& model_tag);

struct NormalComparisonRow {
  double tau = 0.0;
  double beta = 0.0;
  double gamma = 0.0;       // standard-normal quantile
  double difference = 0.0;  // beta - gamma
  std::string tail_flag;    // "thinner" / "fatter" at the 5% and 95% rows
};

// Slope-vs-gamma comparison across a tau grid. Requires single-regressor
// fits; tol widens the no-flag zone for Monte-Carlo noise.
std::vector<NormalComparisonRow> compare_to_normal(std::span<const QuantileFit> fits, double tol = 0.0);

struct CoverageReport {
  std::string model;
  double tau = 0.0;
  std::size_t n = 0;
  std::size_t violations = 0;  // realized return strictly below the forecast
  double rate = 0.0;
  double std_error = 0.0;  // binomial, sqrt(rate (1-rate) / n)
};

// Unconditional coverage per (model, tau). Every forecast must find its
// (asset, date) in the realized series.
std::vector<CoverageReport> violation_rate(std::span<const VaRForecast> forecasts,
                                           std::span<const DatedSeries> realized);

}  // namespace panelvar
