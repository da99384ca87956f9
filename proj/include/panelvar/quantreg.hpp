#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "panelvar/panel.hpp"

namespace panelvar {

// Check (pinball) loss rho_tau(u) = u (tau - 1{u<0}).
double check_loss(double u, double tau);

struct SolverReport {
  int iterations = 0;
  std::string status;   // "optimal" on success
  double gap = 0.0;     // certified normalized subgradient slack at the solution
};

struct QuantileFit {
  double tau = 0.0;
  std::vector<std::string> assets;
  Eigen::VectorXd alpha;             // one fixed effect per asset
  std::vector<std::string> columns;
  Eigen::VectorXd beta;              // one slope per regressor column
  double objective_value = 0.0;
  SolverReport solver;
};

struct FitOptions {
  // Walk flat optimal edges towards the lexicographically smallest
  // parameter vector (lower endpoint of a degenerate minimizer set).
  bool lex_polish = true;
  int max_pivots = 0;  // 0: scale-based default
};

// Attained value of the fixed-effects objective: sum of check losses of
// r - alpha_i - x'beta over all observations.
double objective(const PanelDataset& data, double tau, const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta);

QuantileFit fit_panel_qr(const PanelDataset& data, double tau, const FitOptions& options = {});

// Single-asset special case; the asset's fixed effect is the intercept.
QuantileFit fit_univariate_qr(const PanelDataset& data, std::size_t asset_idx, double tau,
                              const FitOptions& options = {});

struct CrossingDiagnostic {
  std::size_t pair_violations = 0;    // adjacent-tau inversions over all rows
  std::size_t rows_affected = 0;      // rows with at least one inversion
  double max_gap = 0.0;               // largest inversion magnitude
};

struct QuantileCurve {
  std::vector<QuantileFit> fits;      // one per tau, in grid order
  CrossingDiagnostic crossing;
};

// Independent fits over a strictly increasing tau grid plus the quantile
// crossing diagnostic (reported, never corrected).
QuantileCurve fit_quantile_curve(const PanelDataset& data, std::span<const double> taus,
                                 const FitOptions& options = {});

// Monotone rearrangement of one row's predicted quantile curve (optional
// post-process; off by default everywhere).
std::vector<double> rearrange(std::vector<double> curve);

// Fitted conditional quantile per panel row.
Eigen::VectorXd fitted_values(const PanelDataset& data, const QuantileFit& fit);

// JSON form: {tau, beta:{col:val}, alpha:{asset:val}, objective,
// solver:{iters,gap,status}} with deterministic field order.
nlohmann::ordered_json fit_to_json(const QuantileFit& fit);
QuantileFit fit_from_json(const nlohmann::ordered_json& j);

// --- low-level solver surface (design matrix form) ---------------------

struct LpResult {
  Eigen::VectorXd theta;
  double objective = 0.0;
  SolverReport report;
};

// Exact minimizer of sum_i rho_tau(y_i - z_i' theta) for a full-column-rank
// design. Solves the split-residual LP by long-step basis exchange, so the
// returned theta is an exact vertex solution.
LpResult solve_check_loss_lp(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, double tau,
                             const FitOptions& options = {},
                             const std::vector<std::string>* column_names = nullptr);

// Smallest normalized directional derivative of the objective over the
// +/- unit parameter directions; >= 0 (up to tolerance) certifies optimality.
double subgradient_certificate(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, double tau,
                               const Eigen::VectorXd& theta);

}  // namespace panelvar
