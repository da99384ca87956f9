#include "panelvar/varengine.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "panelvar/common.hpp"

namespace panelvar {

double parametric_var(double tau, double sigma) {
  if (sigma < 0.0) throw data_error("parametric_var: sigma must be non-negative");
  return normal_quantile(tau) * sigma;
}

VaRForecast forecast_var(const QuantileFit& fit, const Eigen::VectorXd& x_latest, const std::string& asset,
                         Date target_date, const std::string& model_tag) {
  auto it = std::find(fit.assets.begin(), fit.assets.end(), asset);
  if (it == fit.assets.end()) throw data_error("forecast_var: asset " + asset + " not present in the fit");
  if (x_latest.size() != fit.beta.size())
    throw data_error("forecast_var: regressor row has " + std::to_string(x_latest.size()) + " columns, fit has " +
                     std::to_string(fit.beta.size()));
  VaRForecast f;
  f.asset = asset;
  f.date = target_date;
  f.tau = fit.tau;
  f.model = model_tag;
  f.value = fit.alpha[it - fit.assets.begin()] + x_latest.dot(fit.beta);
  return f;
}

std::vector<NormalComparisonRow> compare_to_normal(std::span<const QuantileFit> fits, double tol) {
  std::vector<NormalComparisonRow> rows;
  rows.reserve(fits.size());
  for (const auto& fit : fits) {
    if (fit.beta.size() != 1)
      throw data_error("compare_to_normal: requires single-volatility-column fits; compare columns one at a time");
    NormalComparisonRow row;
    row.tau = fit.tau;
    row.beta = fit.beta[0];
    row.gamma = normal_quantile(fit.tau);
    row.difference = row.beta - row.gamma;
    const bool tail = std::fabs(fit.tau - 0.05) < 1e-9 || std::fabs(fit.tau - 0.95) < 1e-9;
    if (tail) {
      if (std::fabs(row.beta) < std::fabs(row.gamma) - tol)
        row.tail_flag = "thinner";
      else if (std::fabs(row.beta) > std::fabs(row.gamma) + tol)
        row.tail_flag = "fatter";
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CoverageReport> violation_rate(std::span<const VaRForecast> forecasts,
                                           std::span<const DatedSeries> realized) {
  // (asset, date) -> realized return
  std::map<std::pair<std::string, Date>, double> lookup;
  for (const auto& series : realized)
    for (std::size_t i = 0; i < series.dates.size(); ++i)
      lookup[{series.instrument, series.dates[i]}] = series.values[i];

  std::map<std::pair<std::string, double>, CoverageReport> groups;
  for (const auto& f : forecasts) {
    auto it = lookup.find({f.asset, f.date});
    if (it == lookup.end())
      throw data_error("violation_rate: no realized return for " + f.asset + " on " + f.date.to_string());
    CoverageReport& g = groups[{f.model, f.tau}];
    g.model = f.model;
    g.tau = f.tau;
    g.n++;
    if (it->second < f.value) g.violations++;
  }
  std::vector<CoverageReport> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) {
    g.rate = static_cast<double>(g.violations) / static_cast<double>(g.n);
    g.std_error = std::sqrt(g.rate * (1.0 - g.rate) / static_cast<double>(g.n));
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace panelvar
