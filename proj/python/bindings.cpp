#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "panelvar/common.hpp"
#include "panelvar/distributions.hpp"
#include "panelvar/implied.hpp"
#include "panelvar/inference.hpp"
#include "panelvar/marketdata.hpp"
#include "panelvar/panel.hpp"
#include "panelvar/quantreg.hpp"
#include "panelvar/synth.hpp"
#include "panelvar/varengine.hpp"

namespace py = pybind11;
using namespace panelvar;

namespace {

PanelDataset make_panel(std::vector<std::string> assets, const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                        std::vector<std::string> columns) {
  if (assets.empty()) throw data_error("panel: no assets");
  if (y.size() != x.rows()) throw data_error("panel: y and x row counts differ");
  if (static_cast<std::size_t>(x.cols()) != columns.size()) throw data_error("panel: column names/x mismatch");
  if (y.size() % static_cast<Eigen::Index>(assets.size()) != 0)
    throw data_error("panel: observation count must be a multiple of the asset count (date-major layout)");
  PanelDataset panel;
  panel.assets = std::move(assets);
  panel.columns = std::move(columns);
  const std::size_t nd = static_cast<std::size_t>(y.size()) / panel.assets.size();
  Date d = Date::from_ymd(2000, 1, 3);
  for (std::size_t t = 0; t < nd; ++t) {
    panel.dates.push_back(d);
    d = d.next_weekday();
  }
  panel.y = y;
  panel.x = x;
  panel.target_dates.assign(panel.n_obs(), Date{});
  for (std::size_t t = 0; t < nd; ++t)
    for (std::size_t a = 0; a < panel.assets.size(); ++a)
      panel.target_dates[t * panel.assets.size() + a] = panel.dates[t].next_weekday();
  panel.validate();
  return panel;
}

py::dict fit_to_dict(const QuantileFit& fit) {
  py::dict beta, alpha;
  for (std::size_t c = 0; c < fit.columns.size(); ++c) beta[py::str(fit.columns[c])] = fit.beta[c];
  for (std::size_t a = 0; a < fit.assets.size(); ++a) alpha[py::str(fit.assets[a])] = fit.alpha[a];
  py::dict d;
  d["tau"] = fit.tau;
  d["beta"] = beta;
  d["alpha"] = alpha;
  d["objective"] = fit.objective_value;
  d["iterations"] = fit.solver.iterations;
  d["gap"] = fit.solver.gap;
  d["status"] = fit.solver.status;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Panel quantile regression VaR toolkit (C++ core)";

  py::register_exception<data_error>(m, "DataError");
  py::register_exception<numerical_error>(m, "NumericalError");

  m.def("check_loss", &check_loss, py::arg("u"), py::arg("tau"));
  m.def("normal_quantile", &normal_quantile, py::arg("p"));
  m.def("normal_cdf", &normal_cdf, py::arg("x"));
  m.def("student_t_quantile", &student_t_quantile, py::arg("p"), py::arg("dof"));
  m.def("parametric_var", &parametric_var, py::arg("tau"), py::arg("sigma"));
  m.def("index_level", &index_level, py::arg("variance"));
  m.def("deannualize", &deannualize, py::arg("index_annual"));

  m.def(
      "cboe_variance",
      [](double t_years, double forward, double k0, double rate,
         const std::vector<std::tuple<double, std::string, double>>& quotes) {
        OptionChainSnapshot chain;
        chain.t_years = t_years;
        chain.forward = forward;
        chain.k0 = k0;
        chain.rate = rate;
        for (const auto& [strike, side, mid] : quotes)
          chain.quotes.push_back(OptionQuote{strike, side == "call" ? OptionSide::call : OptionSide::put, mid});
        return cboe_variance(chain);
      },
      py::arg("t_years"), py::arg("forward"), py::arg("k0"), py::arg("rate"), py::arg("quotes"),
      "Annualized implied variance from an option-chain snapshot; quotes are (strike, 'put'|'call', mid).");

  m.def(
      "realized_vol",
      [](const std::vector<double>& log_prices) {
        double sum_sq = 0.0;
        for (std::size_t k = 1; k < log_prices.size(); ++k) {
          double d = log_prices[k] - log_prices[k - 1];
          sum_sq += d * d;
        }
        return std::sqrt(sum_sq);
      },
      py::arg("log_prices"), "sqrt of the sum of squared consecutive log-price differences for one session.");

  m.def(
      "descriptive_stats",
      [](const std::vector<double>& x) {
        StatsSummary s = descriptive_stats(x);
        py::dict d;
        d["mean"] = s.mean;
        d["st_dev"] = s.st_dev;
        d["skewness"] = s.skewness ? py::cast(*s.skewness) : py::none();
        d["excess_kurtosis"] = s.excess_kurtosis ? py::cast(*s.excess_kurtosis) : py::none();
        d["median"] = s.median;
        d["minimum"] = s.minimum;
        d["maximum"] = s.maximum;
        return d;
      },
      py::arg("x"));

  m.def(
      "fit_panel_qr",
      [](std::vector<std::string> assets, const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
         std::vector<std::string> columns, double tau) {
        return fit_to_dict(fit_panel_qr(make_panel(std::move(assets), y, x, std::move(columns)), tau));
      },
      py::arg("assets"), py::arg("y"), py::arg("x"), py::arg("columns"), py::arg("tau"),
      "Fixed-effects panel quantile regression. Rows are date-major: (date0,asset0), (date0,asset1), ...");

  m.def(
      "fit_qr",
      [](const Eigen::VectorXd& y, const Eigen::MatrixXd& design, double tau) {
        LpResult r = solve_check_loss_lp(design, y, tau);
        return py::make_tuple(r.theta, r.objective);
      },
      py::arg("y"), py::arg("design"), py::arg("tau"),
      "Exact check-loss minimizer for an explicit design matrix; returns (theta, objective).");

  m.def(
      "oracle_qr",
      [](const Eigen::VectorXd& y, const Eigen::MatrixXd& design, double tau) {
        OracleResult r = oracle_qr(design, y, tau);
        return py::make_tuple(r.parameters, r.objective, r.bases_evaluated);
      },
      py::arg("y"), py::arg("design"), py::arg("tau"),
      "Exhaustive subset-interpolation optimum (n <= 25, k <= 4).");

  m.def(
      "bootstrap_fit",
      [](std::vector<std::string> assets, const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
         std::vector<std::string> columns, double tau, int replicates, std::uint64_t seed, int block_length,
         double confidence_level) {
        BootstrapConfig cfg;
        cfg.replicates = replicates;
        cfg.seed = seed;
        cfg.block_length = block_length;
        cfg.confidence_level = confidence_level;
        InferenceReport rep = bootstrap_fit(make_panel(std::move(assets), y, x, std::move(columns)), tau, cfg);
        py::list params;
        for (const auto& p : rep.params) {
          py::dict d;
          d["name"] = p.name;
          d["estimate"] = p.estimate;
          d["std_error"] = p.std_error ? py::cast(*p.std_error) : py::none();
          d["t_stat"] = p.t_stat ? py::cast(*p.t_stat) : py::none();
          d["ci_lo"] = p.ci_lo;
          d["ci_hi"] = p.ci_hi;
          params.append(d);
        }
        return params;
      },
      py::arg("assets"), py::arg("y"), py::arg("x"), py::arg("columns"), py::arg("tau"),
      py::arg("replicates") = 200, py::arg("seed") = 0, py::arg("block_length") = 1,
      py::arg("confidence_level") = 0.95,
      "Day-slice pairs bootstrap; returns per-parameter estimate, SE, t and CI.");

  m.def(
      "generate_panel",
      [](int n_assets, int n_days, const std::string& law, double t_dof, std::uint64_t seed, bool with_index) {
        SynthSpec spec;
        spec.n_assets = n_assets;
        spec.n_days = n_days;
        spec.law = innovation_law_from_string(law);
        spec.t_dof = t_dof;
        spec.seed = seed;
        spec.with_index = with_index;
        SynthPanel p = generate_panel(spec);
        py::dict d;
        d["assets"] = p.panel.assets;
        d["columns"] = p.panel.columns;
        d["y"] = p.panel.y;
        d["x"] = p.panel.x;
        d["fixed_effects"] = p.fixed_effects;
        return d;
      },
      py::arg("n_assets"), py::arg("n_days"), py::arg("law") = "normal", py::arg("t_dof") = 4.0,
      py::arg("seed") = 1, py::arg("with_index") = false,
      "Synthetic location-scale panel (date-major rows) with known true quantiles.");

  m.def(
      "true_beta",
      [](const std::string& law, double tau, double t_dof) {
        SynthPanel p;
        p.law = innovation_law_from_string(law);
        p.t_dof = t_dof;
        return p.true_beta(tau);
      },
      py::arg("law"), py::arg("tau"), py::arg("t_dof") = 4.0);
}
