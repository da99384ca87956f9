#include "panelvar/quantreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "panelvar/common.hpp"

namespace panelvar {

double check_loss(double u, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw data_error("check_loss: tau must lie in (0,1)");
  return u * (tau - (u < 0.0 ? 1.0 : 0.0));
}

namespace {

double check_loss_unchecked(double u, double tau) { return u * (tau - (u < 0.0 ? 1.0 : 0.0)); }

// One-sided cost rate of a zero-residual observation pushed by slope s.
double zero_rate(double s, double tau) { return s > 0.0 ? s * (1.0 - tau) : -s * tau; }

// Long-step basis-exchange simplex on the residual-split LP. A basis is a
// set of p observations fit exactly; every pivot walks the steepest descent
// edge through all residual sign crossings (weighted-median step) and lands
// on the adjacent vertex. Solutions are exact vertex minimizers.
class QrSimplex {
 public:
  QrSimplex(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, double tau, const FitOptions& options)
      : z_(design), y_(response), tau_(tau), n_(design.rows()), p_(design.cols()), options_(options) {}

  LpResult run() {
    check_rank();
    pick_initial_basis();
    refactorize();

    const int max_pivots =
        options_.max_pivots > 0 ? options_.max_pivots : static_cast<int>(20 * n_ + 100 * p_ + 1000);
    int pivots = 0;
    int stale = 0;  // pivots since last refactorization
    for (;;) {
      Derivatives der = derivatives();
      int best = -1;
      double best_g = 0.0;
      for (int k = 0; k < 2 * p_; ++k) {
        double tol = 1e-10 * (1.0 + colabs_[k / 2]);
        if (der.g[k] < -tol && (best < 0 || der.g[k] < best_g)) {
          best = k;
          best_g = der.g[k];
        }
      }
      if (best < 0) break;  // vertex optimal
      if (++pivots > max_pivots) throw numerical_error("quantile LP: pivot limit exceeded");

      Step step = line_search(best / 2, best % 2 ? -1.0 : 1.0, der.g[best]);
      if (step.entering < 0) throw numerical_error("quantile LP: descent direction without breakpoints");
      commit(best / 2, best % 2 ? -1.0 : 1.0, step);
      if (++stale >= 128) {
        refactorize();
        stale = 0;
      }
    }

    refactorize();  // exact parameters from the final basis
    if (options_.lex_polish) lex_polish();

    LpResult result;
    result.theta = theta_;
    result.objective = current_objective();
    result.report.iterations = pivots;
    result.report.status = "optimal";
    double cert = subgradient_certificate(z_, y_, tau_, theta_);
    result.report.gap = std::max(0.0, -cert);
    return result;
  }

 private:
  struct Derivatives {
    // Directional derivatives indexed 2*j (sigma=+1) and 2*j+1 (sigma=-1).
    Eigen::VectorXd g;
    Eigen::VectorXd g_lin;
  };
  struct Step {
    int entering = -1;
    double t = 0.0;
  };

  void check_rank() {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z_);
    const int rank = static_cast<int>(qr.rank());
    if (rank < p_) {
      // Name a redundant column: one whose removal keeps the rank. Scanning
      // from the right reports a regressor rather than an asset dummy when
      // the two collide.
      int offending = p_ - 1;
      for (int c = p_ - 1; c >= 0; --c) {
        Eigen::MatrixXd reduced(n_, p_ - 1);
        reduced << z_.leftCols(c), z_.rightCols(p_ - 1 - c);
        if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(reduced).rank() == rank) {
          offending = c;
          break;
        }
      }
      std::string name = column_names_ && offending < static_cast<int>(column_names_->size())
                             ? (*column_names_)[offending]
                             : "#" + std::to_string(offending);
      throw numerical_error("quantile LP: design matrix is rank deficient (column " + name + ")");
    }
    theta_ = qr.solve(y_);  // least-squares warm start
  }

  void pick_initial_basis() {
    Eigen::VectorXd r = y_ - z_ * theta_;
    std::vector<int> order(n_);
    for (int i = 0; i < n_; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double fa = std::fabs(r[a]), fb = std::fabs(r[b]);
      if (fa != fb) return fa < fb;
      return a < b;
    });
    basis_.clear();
    in_basis_.assign(n_, 0);
    Eigen::MatrixXd q(p_, p_);  // orthonormal rows of the span so far
    int rank = 0;
    for (double tol : {1e-9, 1e-14}) {
      for (int idx : order) {
        if (rank == p_) break;
        if (in_basis_[idx]) continue;
        Eigen::VectorXd v = z_.row(idx).transpose();
        for (int k = 0; k < rank; ++k) v -= q.row(k).dot(z_.row(idx)) * q.row(k).transpose();
        double norm = v.norm();
        if (norm > tol * (1.0 + z_.row(idx).norm())) {
          q.row(rank++) = v.transpose() / norm;
          basis_.push_back(idx);
          in_basis_[idx] = 1;
        }
      }
      if (rank == p_) break;
    }
    if (rank < p_) throw numerical_error("quantile LP: could not assemble a nonsingular starting basis");
  }

  void refactorize() {
    Eigen::MatrixXd zb(p_, p_);
    Eigen::VectorXd yb(p_);
    for (int m = 0; m < p_; ++m) {
      zb.row(m) = z_.row(basis_[m]);
      yb[m] = y_[basis_[m]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(zb);
    if (!lu.isInvertible()) throw numerical_error("quantile LP: singular basis");
    inv_ = lu.inverse();
    theta_ = inv_ * yb;
    tableau_ = z_ * inv_;
    residual_ = y_ - z_ * theta_;
    for (int m = 0; m < p_; ++m) {
      residual_[basis_[m]] = 0.0;
      tableau_.row(basis_[m]).setZero();
      tableau_(basis_[m], m) = 1.0;
    }
    colabs_ = tableau_.cwiseAbs().colwise().sum();
  }

  bool is_zero_residual(int i) const { return std::fabs(residual_[i]) <= 1e-13 * (1.0 + std::fabs(y_[i])); }

  Derivatives derivatives() {
    Derivatives der;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n_);
    degenerate_.clear();
    for (int i = 0; i < n_; ++i) {
      if (in_basis_[i]) continue;
      if (is_zero_residual(i)) {
        degenerate_.push_back(i);
        continue;
      }
      w[i] = -(tau_ - (residual_[i] < 0.0 ? 1.0 : 0.0));
    }
    der.g_lin = tableau_.transpose() * w;
    der.g.resize(2 * p_);
    for (int j = 0; j < p_; ++j) {
      double plus = der.g_lin[j] + (1.0 - tau_);
      double minus = -der.g_lin[j] + tau_;
      for (int i : degenerate_) {
        plus += zero_rate(tableau_(i, j), tau_);
        minus += zero_rate(-tableau_(i, j), tau_);
      }
      der.g[2 * j] = plus;
      der.g[2 * j + 1] = minus;
    }
    return der;
  }

  Step line_search(int j, double sigma, double g0) {
    breakpoints_.clear();
    for (int i = 0; i < n_; ++i) {
      if (in_basis_[i]) continue;
      double s = sigma * tableau_(i, j);
      if (std::fabs(s) <= 1e-14 * (1.0 + colabs_[j])) continue;
      if (is_zero_residual(i)) continue;  // cost rate already charged in g0
      double t = residual_[i] / s;
      if (t > 0.0) breakpoints_.push_back({t, i});
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
    double cum = g0;
    for (const auto& [t, i] : breakpoints_) {
      cum += std::fabs(tableau_(i, j));
      if (cum >= 0.0) return Step{i, t};
    }
    return Step{};
  }

  void commit(int j, double sigma, const Step& step) {
    const int e = step.entering;
    const double pivot = tableau_(e, j);
    if (std::fabs(pivot) < 1e-13 * (1.0 + colabs_[j]))
      throw numerical_error("quantile LP: pivot element vanished");

    theta_ += step.t * sigma * inv_.col(j);
    residual_ -= (step.t * sigma) * tableau_.col(j);
    residual_[e] = 0.0;

    Eigen::RowVectorXd w = tableau_.row(e);
    w[j] -= 1.0;
    Eigen::VectorXd col = tableau_.col(j);
    Eigen::VectorXd inv_col = inv_.col(j);
    tableau_.noalias() -= (col / pivot) * w;
    inv_.noalias() -= (inv_col / pivot) * w;
    tableau_.row(e).setZero();
    tableau_(e, j) = 1.0;

    in_basis_[basis_[j]] = 0;
    in_basis_[e] = 1;
    basis_[j] = e;
  }

  double current_objective() const {
    double total = 0.0;
    for (int i = 0; i < n_; ++i) total += check_loss_unchecked(residual_[i], tau_);
    return total;
  }

  // Within the optimal face, walk flat edges towards the lexicographically
  // smallest parameter vector (the lower endpoint of a degenerate minimizer
  // interval). Non-degenerate problems have no flat edge and skip this.
  void lex_polish() {
    for (int round = 0; round < 4 * p_ + 8; ++round) {
      Derivatives der = derivatives();
      bool moved = false;
      for (int k = 0; k < 2 * p_ && !moved; ++k) {
        int j = k / 2;
        double sigma = k % 2 ? -1.0 : 1.0;
        double flat_tol = 1e-9 * (1.0 + colabs_[j]);
        if (std::fabs(der.g[k]) > flat_tol) continue;
        Step step = line_search(j, sigma, 0.0);
        if (step.entering < 0) continue;
        Eigen::VectorXd candidate = theta_ + step.t * sigma * inv_.col(j);
        if (!lex_smaller(candidate, theta_)) continue;
        commit(j, sigma, step);
        refactorize();
        moved = true;
      }
      if (!moved) return;
    }
  }

  static bool lex_smaller(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index l = 0; l < a.size(); ++l) {
      double tol = 1e-10 * (1.0 + std::fabs(b[l]));
      if (a[l] < b[l] - tol) return true;
      if (a[l] > b[l] + tol) return false;
    }
    return false;
  }

 public:
  const std::vector<std::string>* column_names_ = nullptr;

 private:
  const Eigen::MatrixXd& z_;
  const Eigen::VectorXd& y_;
  const double tau_;
  const int n_;
  const int p_;
  FitOptions options_;

  std::vector<int> basis_;
  std::vector<std::uint8_t> in_basis_;
  Eigen::MatrixXd inv_;      // inverse of the basis matrix
  Eigen::MatrixXd tableau_;  // Z * inv
  Eigen::VectorXd theta_;
  Eigen::VectorXd residual_;
  Eigen::VectorXd colabs_;
  std::vector<int> degenerate_;
  std::vector<std::pair<double, int>> breakpoints_;
};

}  // namespace

LpResult solve_check_loss_lp(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, double tau,
                             const FitOptions& options, const std::vector<std::string>* column_names) {
  if (!(tau > 0.0 && tau < 1.0)) throw data_error("quantile LP: tau must lie in (0,1)");
  if (design.rows() != response.size()) throw data_error("quantile LP: design/response size mismatch");
  if (design.rows() < design.cols()) throw data_error("quantile LP: fewer observations than parameters");
  QrSimplex solver(design, response, tau, options);
  solver.column_names_ = column_names;
  return solver.run();
}

double subgradient_certificate(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, double tau,
                               const Eigen::VectorXd& theta) {
  const Eigen::VectorXd residual = response - design * theta;
  double worst = std::numeric_limits<double>::infinity();
  for (Eigen::Index l = 0; l < design.cols(); ++l) {
    double scale = 1.0 + design.col(l).cwiseAbs().sum();
    for (double sigma : {1.0, -1.0}) {
      double g = 0.0;
      for (Eigen::Index i = 0; i < design.rows(); ++i) {
        double s = sigma * design(i, l);
        if (std::fabs(residual[i]) <= 1e-9 * (1.0 + std::fabs(response[i])))
          g += zero_rate(s, tau);
        else
          g += -s * (tau - (residual[i] < 0.0 ? 1.0 : 0.0));
      }
      worst = std::min(worst, g / scale);
    }
  }
  return worst;
}

namespace {

// Stacked design: one dummy column per asset followed by the regressors.
Eigen::MatrixXd panel_design(const PanelDataset& data, std::vector<std::string>* names) {
  const std::size_t na = data.n_assets();
  const std::size_t n = data.n_obs();
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, na + data.columns.size());
  for (std::size_t i = 0; i < n; ++i) z(i, i % na) = 1.0;
  z.rightCols(data.x.cols()) = data.x;
  if (names) {
    names->clear();
    for (const auto& a : data.assets) names->push_back("alpha_" + a);
    for (const auto& c : data.columns) names->push_back(c);
  }
  return z;
}

}  // namespace

double objective(const PanelDataset& data, double tau, const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta) {
  if (!(tau > 0.0 && tau < 1.0)) throw data_error("objective: tau must lie in (0,1)");
  if (static_cast<std::size_t>(alpha.size()) != data.n_assets())
    throw data_error("objective: alpha size does not match the asset count");
  if (beta.size() != data.x.cols()) throw data_error("objective: beta size does not match the regressor count");
  const std::size_t na = data.n_assets();
  double total = 0.0;
  for (std::size_t i = 0; i < data.n_obs(); ++i)
    total += check_loss_unchecked(data.y[i] - alpha[i % na] - data.x.row(i).dot(beta), tau);
  return total;
}

QuantileFit fit_panel_qr(const PanelDataset& data, double tau, const FitOptions& options) {
  if (!(tau > 0.0 && tau < 1.0)) throw data_error("fit_panel_qr: tau must lie in (0,1)");
  const std::size_t params = data.n_assets() + data.columns.size();
  if (data.n_obs() <= params)
    throw data_error("fit_panel_qr: need more observations than parameters (" + std::to_string(data.n_obs()) +
                     " obs, " + std::to_string(params) + " parameters)");
  std::vector<std::string> names;
  Eigen::MatrixXd z = panel_design(data, &names);
  LpResult lp = solve_check_loss_lp(z, data.y, tau, options, &names);

  QuantileFit fit;
  fit.tau = tau;
  fit.assets = data.assets;
  fit.columns = data.columns;
  fit.alpha = lp.theta.head(data.n_assets());
  fit.beta = lp.theta.tail(data.columns.size());
  fit.objective_value = lp.objective;
  fit.solver = lp.report;
  return fit;
}

QuantileFit fit_univariate_qr(const PanelDataset& data, std::size_t asset_idx, double tau,
                              const FitOptions& options) {
  return fit_panel_qr(data.select_asset(asset_idx), tau, options);
}

Eigen::VectorXd fitted_values(const PanelDataset& data, const QuantileFit& fit) {
  if (fit.columns != data.columns) throw data_error("fitted_values: regressor columns do not match the fit");
  if (fit.assets != data.assets) throw data_error("fitted_values: assets do not match the fit");
  const std::size_t na = data.n_assets();
  Eigen::VectorXd out(data.n_obs());
  for (std::size_t i = 0; i < data.n_obs(); ++i)
    out[i] = fit.alpha[i % na] + data.x.row(i).dot(fit.beta);
  return out;
}

QuantileCurve fit_quantile_curve(const PanelDataset& data, std::span<const double> taus, const FitOptions& options) {
  if (taus.empty()) throw data_error("fit_quantile_curve: empty tau grid");
  for (std::size_t k = 0; k < taus.size(); ++k) {
    if (!(taus[k] > 0.0 && taus[k] < 1.0)) throw data_error("fit_quantile_curve: tau must lie in (0,1)");
    if (k > 0 && !(taus[k - 1] < taus[k]))
      throw data_error("fit_quantile_curve: tau grid must be strictly increasing");
  }
  QuantileCurve curve;
  curve.fits.reserve(taus.size());
  for (double tau : taus) curve.fits.push_back(fit_panel_qr(data, tau, options));

  if (taus.size() > 1) {
    std::vector<Eigen::VectorXd> fitted;
    fitted.reserve(taus.size());
    for (const auto& fit : curve.fits) fitted.push_back(fitted_values(data, fit));
    for (std::size_t i = 0; i < data.n_obs(); ++i) {
      bool affected = false;
      for (std::size_t k = 1; k < taus.size(); ++k) {
        double gap = fitted[k - 1][i] - fitted[k][i];
        if (gap > 1e-10 * (1.0 + std::fabs(fitted[k][i]))) {
          curve.crossing.pair_violations++;
          curve.crossing.max_gap = std::max(curve.crossing.max_gap, gap);
          affected = true;
        }
      }
      if (affected) curve.crossing.rows_affected++;
    }
  }
  return curve;
}

std::vector<double> rearrange(std::vector<double> curve) {
  std::sort(curve.begin(), curve.end());
  return curve;
}

nlohmann::ordered_json fit_to_json(const QuantileFit& fit) {
  nlohmann::ordered_json j;
  j["tau"] = fit.tau;
  nlohmann::ordered_json beta;
  for (std::size_t c = 0; c < fit.columns.size(); ++c) beta[fit.columns[c]] = fit.beta[c];
  j["beta"] = std::move(beta);
  nlohmann::ordered_json alpha;
  for (std::size_t a = 0; a < fit.assets.size(); ++a) alpha[fit.assets[a]] = fit.alpha[a];
  j["alpha"] = std::move(alpha);
  j["objective"] = fit.objective_value;
  j["solver"] = {{"iters", fit.solver.iterations}, {"gap", fit.solver.gap}, {"status", fit.solver.status}};
  return j;
}

QuantileFit fit_from_json(const nlohmann::ordered_json& j) {
  QuantileFit fit;
  fit.tau = j.at("tau").get<double>();
  const auto& beta = j.at("beta");
  fit.beta.resize(beta.size());
  Eigen::Index c = 0;
  for (auto it = beta.begin(); it != beta.end(); ++it, ++c) {
    fit.columns.push_back(it.key());
    fit.beta[c] = it.value().get<double>();
  }
  const auto& alpha = j.at("alpha");
  fit.alpha.resize(alpha.size());
  Eigen::Index a = 0;
  for (auto it = alpha.begin(); it != alpha.end(); ++it, ++a) {
    fit.assets.push_back(it.key());
    fit.alpha[a] = it.value().get<double>();
  }
  fit.objective_value = j.at("objective").get<double>();
  const auto& solver = j.at("solver");
  fit.solver.iterations = solver.at("iters").get<int>();
  fit.solver.gap = solver.at("gap").get<double>();
  fit.solver.status = solver.at("status").get<std::string>();
  return fit;
}

}  // namespace panelvar
