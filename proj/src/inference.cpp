#include "panelvar/inference.hpp"

#include <algorithm>
#include <cmath>

#include "panelvar/common.hpp"
#include "panelvar/rng.hpp"

namespace panelvar {

void BootstrapConfig::validate() const {
  if (replicates < 2) throw data_error("bootstrap: need at least 2 replicates");
  if (block_length < 1) throw data_error("bootstrap: block length must be positive");
  if (!(confidence_level > 0.0 && confidence_level < 1.0))
    throw data_error("bootstrap: confidence level must lie in (0,1)");
}

namespace {

std::vector<std::size_t> draw_dates(SplitMix64& rng, std::size_t n_dates, int block_length) {
  std::vector<std::size_t> idx;
  idx.reserve(n_dates);
  if (block_length <= 1) {
    for (std::size_t t = 0; t < n_dates; ++t) idx.push_back(rng.bounded(n_dates));
    return idx;
  }
  const std::size_t l = std::min<std::size_t>(static_cast<std::size_t>(block_length), n_dates);
  while (idx.size() < n_dates) {
    std::size_t start = rng.bounded(n_dates - l + 1);
    for (std::size_t k = 0; k < l && idx.size() < n_dates; ++k) idx.push_back(start + k);
  }
  return idx;
}

std::vector<std::string> param_names(const PanelDataset& data) {
  std::vector<std::string> names;
  for (const auto& c : data.columns) names.push_back("beta_" + c);
  for (const auto& a : data.assets) names.push_back("alpha_" + a);
  return names;
}

Eigen::VectorXd stack_params(const QuantileFit& fit) {
  Eigen::VectorXd v(fit.beta.size() + fit.alpha.size());
  v << fit.beta, fit.alpha;
  return v;
}

}  // namespace

double empirical_quantile(std::vector<double> sample, double p) {
  if (sample.empty()) throw data_error("empirical_quantile: empty sample");
  std::sort(sample.begin(), sample.end());
  if (p <= 0.0) return sample.front();
  if (p >= 1.0) return sample.back();
  double h = (static_cast<double>(sample.size()) - 1.0) * p;
  std::size_t lo = static_cast<std::size_t>(h);
  double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sample.size()) return sample.back();
  return sample[lo] + frac * (sample[lo + 1] - sample[lo]);
}

std::vector<ParamInference> bootstrap_statistics(const std::vector<std::string>& names,
                                                 const Eigen::VectorXd& point_estimates,
                                                 const Eigen::MatrixXd& replicates, double confidence_level) {
  if (point_estimates.size() != replicates.cols() ||
      names.size() != static_cast<std::size_t>(point_estimates.size()))
    throw data_error("bootstrap_statistics: shape mismatch");
  const double b = static_cast<double>(replicates.rows());
  std::vector<ParamInference> out(names.size());
  for (std::size_t k = 0; k < names.size(); ++k) {
    ParamInference& p = out[k];
    p.name = names[k];
    p.estimate = point_estimates[static_cast<Eigen::Index>(k)];
    const auto col = replicates.col(static_cast<Eigen::Index>(k));
    double mean = col.mean();
    double var = (col.array() - mean).square().sum() / (b - 1.0);
    double se = std::sqrt(var);
    if (se > 0.0) {
      p.std_error = se;
      p.t_stat = p.estimate / se;
    }
    std::vector<double> sample(col.data(), col.data() + col.size());
    p.ci_lo = empirical_quantile(sample, (1.0 - confidence_level) / 2.0);
    p.ci_hi = empirical_quantile(std::move(sample), (1.0 + confidence_level) / 2.0);
  }
  return out;
}

InferenceReport bootstrap_fit(const PanelDataset& data, double tau, const BootstrapConfig& config,
                              const FitOptions& fit_options) {
  config.validate();
  QuantileFit full = fit_panel_qr(data, tau, fit_options);  // precondition: full-sample fit must succeed

  const int b = config.replicates;
  const std::size_t n_params = data.columns.size() + data.assets.size();
  Eigen::MatrixXd replicates(b, static_cast<Eigen::Index>(n_params));
  std::vector<int> redraw_count(static_cast<std::size_t>(b), 0);

  // Attempt chain per replicate: stream r, then r + B, r + 2B, ... so results
  // do not depend on scheduling. Ten attempts per replicate bounds the total
  // by 10 * B.
  parallel_for(static_cast<std::size_t>(b), config.threads, [&](std::size_t r) {
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 10)
        throw numerical_error("bootstrap: replicate " + std::to_string(r) + " failed to solve after 10 redraws");
      SplitMix64 rng = SplitMix64::stream(config.seed, r + static_cast<std::uint64_t>(attempt) * b);
      auto dates = draw_dates(rng, data.n_dates(), config.block_length);
      try {
        QuantileFit fit = fit_panel_qr(data.select_dates(dates), tau, fit_options);
        replicates.row(static_cast<Eigen::Index>(r)) = stack_params(fit).transpose();
        redraw_count[r] = attempt;
        return;
      } catch (const numerical_error&) {
        continue;  // degenerate resample; redraw
      }
    }
  });

  InferenceReport report;
  report.tau = tau;
  report.replicates = b;
  for (int c : redraw_count) report.redraws += c;
  report.replicate_estimates = std::move(replicates);
  report.params = bootstrap_statistics(param_names(data), stack_params(full), report.replicate_estimates,
                                       config.confidence_level);
  return report;
}

std::vector<Band> confidence_bands(std::span<const InferenceReport> reports) {
  if (reports.empty()) throw data_error("confidence_bands: no reports");
  const std::size_t np = reports[0].params.size();
  for (const auto& rep : reports) {
    if (rep.params.size() != np) throw data_error("confidence_bands: reports disagree on the parameter set");
    for (std::size_t k = 0; k < np; ++k)
      if (rep.params[k].name != reports[0].params[k].name)
        throw data_error("confidence_bands: reports disagree on the parameter set");
  }
  std::vector<Band> bands(np);
  for (std::size_t k = 0; k < np; ++k) {
    Band& band = bands[k];
    band.param = reports[0].params[k].name;
    for (const auto& rep : reports) {
      band.taus.push_back(rep.tau);
      band.point.push_back(rep.params[k].estimate);
      band.lo.push_back(rep.params[k].ci_lo);
      band.hi.push_back(rep.params[k].ci_hi);
      band.empty.push_back(0);
    }
  }
  return bands;
}

Band intersect_bands(std::span<const Band> bands) {
  if (bands.empty()) throw data_error("intersect_bands: no bands");
  const Band& first = bands[0];
  for (const auto& band : bands) {
    if (band.param != first.param) throw data_error("intersect_bands: parameter mismatch");
    if (band.taus != first.taus) throw data_error("intersect_bands: tau grids differ");
  }
  Band out;
  out.param = first.param;
  out.taus = first.taus;
  out.point = first.point;
  for (std::size_t k = 0; k < first.taus.size(); ++k) {
    double lo = first.lo[k], hi = first.hi[k];
    for (const auto& band : bands) {
      lo = std::max(lo, band.lo[k]);
      hi = std::min(hi, band.hi[k]);
    }
    out.lo.push_back(lo);
    out.hi.push_back(hi);
    out.empty.push_back(lo > hi ? 1 : 0);
  }
  return out;
}

nlohmann::ordered_json inference_to_json(const InferenceReport& report) {
  nlohmann::ordered_json j;
  j["tau"] = report.tau;
  j["replicates"] = report.replicates;
  j["redraws"] = report.redraws;
  nlohmann::ordered_json params = nlohmann::ordered_json::array();
  for (const auto& p : report.params) {
    nlohmann::ordered_json pj;
    pj["name"] = p.name;
    pj["estimate"] = p.estimate;
    if (p.std_error)
      pj["std_error"] = *p.std_error;
    else
      pj["std_error"] = nullptr;
    if (p.t_stat)
      pj["t_stat"] = *p.t_stat;
    else
      pj["t_stat"] = nullptr;
    pj["ci_lo"] = p.ci_lo;
    pj["ci_hi"] = p.ci_hi;
    params.push_back(std::move(pj));
  }
  j["params"] = std::move(params);
  return j;
}

}  // namespace panelvar
