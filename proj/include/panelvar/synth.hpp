#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "panelvar/dates.hpp"
#include "panelvar/marketdata.hpp"
#include "panelvar/panel.hpp"

namespace panelvar {

enum class InnovationLaw { normal, student_t, uniform };

InnovationLaw innovation_law_from_string(const std::string& name);
std::string to_string(InnovationLaw law);

// Location-scale panel generator: r_{i,t+1} = a_i + RV_{i,t} * z with the
// volatility regressor following a log-AR(1). The true conditional quantile
// is then alpha_i(tau) = a_i, beta(tau) = F_z^{-1}(tau).
//
// Innovation laws are used raw (not variance-standardized): normal is N(0,1),
// student-t keeps its natural scale, uniform is U(-1,1).
struct SynthSpec {
  int n_assets = 3;
  int n_days = 500;
  std::vector<double> fixed_effects;  // size n_assets; empty -> built-in pattern
  double log_vol_mean = -4.3;         // mean of log RV; exp(-4.3) ~ 0.0136
  double persistence = 0.97;          // AR(1) coefficient, in [0,1)
  double innovation_scale = 0.25;     // std dev of log-vol innovations
  InnovationLaw law = InnovationLaw::normal;
  double t_dof = 4.0;
  std::uint64_t seed = 1;
  Date start_date = Date::from_ymd(2007, 5, 10);
  bool with_index = false;    // also emit a noisy ex-ante proxy regressor
  double index_noise = 0.25;  // lognormal noise scale of the proxy

  void validate() const;
  std::string asset_name(int i) const;
};

struct SynthPanel {
  PanelDataset panel;  // columns: rv_sqrt [, vol_daily]
  std::vector<double> fixed_effects;
  InnovationLaw law = InnovationLaw::normal;
  double t_dof = 4.0;

  double true_beta(double tau) const;  // F_z^{-1}(tau)

  // CSV-ready series in the marketdata schema, so the generated data run
  // through the same pipeline as ingested data.
  std::vector<DatedSeries> returns;
  std::vector<DatedSeries> rv;
  std::vector<DatedSeries> index;  // empty unless with_index
};

SynthPanel generate_panel(const SynthSpec& spec);

// Exact small-scale optimum of the check-loss objective by exhaustive basis
// enumeration: every size-k observation subset is interpolated and scored.
// Ties resolve to the lexicographically smallest parameter vector.
struct OracleResult {
  Eigen::VectorXd parameters;
  double objective = 0.0;
  std::size_t bases_evaluated = 0;
};

OracleResult oracle_qr(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, double tau);

}  // namespace panelvar
