#include "panelvar/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "panelvar/common.hpp"
#include "panelvar/distributions.hpp"
#include "panelvar/rng.hpp"

namespace panelvar {

InnovationLaw innovation_law_from_string(const std::string& name) {
  if (name == "normal") return InnovationLaw::normal;
  if (name == "t" || name == "student_t") return InnovationLaw::student_t;
  if (name == "uniform") return InnovationLaw::uniform;
  throw data_error("unknown innovation law: '" + name + "'");
}

std::string to_string(InnovationLaw law) {
  switch (law) {
    case InnovationLaw::normal: return "normal";
    case InnovationLaw::student_t: return "student_t";
    case InnovationLaw::uniform: return "uniform";
  }
  return "?";
}

void SynthSpec::validate() const {
  if (n_assets < 1) throw data_error("synth: n_assets must be positive");
  if (n_days < 2) throw data_error("synth: n_days must be at least 2");
  if (!(persistence >= 0.0 && persistence < 1.0)) throw data_error("synth: persistence must lie in [0,1)");
  if (!(innovation_scale > 0.0)) throw data_error("synth: innovation scale must be positive");
  if (law == InnovationLaw::student_t && !(t_dof > 2.0)) throw data_error("synth: student-t dof must exceed 2");
  if (!fixed_effects.empty() && fixed_effects.size() != static_cast<std::size_t>(n_assets))
    throw data_error("synth: fixed_effects size must match n_assets");
}

std::string SynthSpec::asset_name(int i) const {
  static const std::array<const char*, 7> tickers = {"CL", "CN", "CT", "GC", "HG", "NG", "SV"};
  if (i < static_cast<int>(tickers.size())) return tickers[static_cast<std::size_t>(i)];
  char buf[8];
  std::snprintf(buf, sizeof(buf), "A%02d", i + 1);
  return buf;
}

namespace {

double draw_innovation(SplitMix64& rng, InnovationLaw law, double t_dof) {
  switch (law) {
    case InnovationLaw::normal:
      return normal_quantile(rng.uniform01());
    case InnovationLaw::student_t: {
      // z / sqrt(chi2_nu / nu) with integer-part chi-square from normals and
      // a gamma-free fractional correction via the quantile for non-integer
      // dof; integer dof is the common case and stays exact.
      double z = normal_quantile(rng.uniform01());
      int nu = static_cast<int>(t_dof);
      if (std::fabs(t_dof - nu) < 1e-12 && nu >= 1) {
        double chi2 = 0.0;
        for (int k = 0; k < nu; ++k) {
          double g = normal_quantile(rng.uniform01());
          chi2 += g * g;
        }
        return z / std::sqrt(chi2 / t_dof);
      }
      return student_t_quantile(rng.uniform01(), t_dof);
    }
    case InnovationLaw::uniform:
      return 2.0 * rng.uniform01() - 1.0;
  }
  return 0.0;
}

}  // namespace

double SynthPanel::true_beta(double tau) const {
  switch (law) {
    case InnovationLaw::normal: return normal_quantile(tau);
    case InnovationLaw::student_t: return student_t_quantile(tau, t_dof);
    case InnovationLaw::uniform: return 2.0 * tau - 1.0;
  }
  return 0.0;
}

SynthPanel generate_panel(const SynthSpec& spec) {
  spec.validate();
  const int na = spec.n_assets;
  const int nd = spec.n_days;

  SynthPanel out;
  out.law = spec.law;
  out.t_dof = spec.t_dof;
  out.fixed_effects = spec.fixed_effects;
  if (out.fixed_effects.empty()) {
    out.fixed_effects.resize(na);
    for (int a = 0; a < na; ++a) out.fixed_effects[a] = -0.002 + 0.001 * (a % 5);
  }

  // Weekday calendar: nd regressor dates plus one trailing return date.
  std::vector<Date> dates;
  dates.reserve(nd + 1);
  Date d = spec.start_date;
  if (d.weekday() > 4) d = d.next_weekday();
  dates.push_back(d);
  for (int t = 0; t < nd; ++t) dates.push_back(dates.back().next_weekday());

  PanelDataset& panel = out.panel;
  panel.assets.resize(na);
  for (int a = 0; a < na; ++a) panel.assets[a] = spec.asset_name(a);
  panel.dates.assign(dates.begin(), dates.end() - 1);
  panel.columns = {"rv_sqrt"};
  if (spec.with_index) panel.columns.push_back("vol_daily");
  panel.y.resize(static_cast<Eigen::Index>(nd) * na);
  panel.x.resize(static_cast<Eigen::Index>(nd) * na, static_cast<Eigen::Index>(panel.columns.size()));
  panel.target_dates.resize(static_cast<std::size_t>(nd) * na);

  out.returns.resize(na);
  out.rv.resize(na);
  if (spec.with_index) out.index.resize(na);

  const double stationary_sd = spec.innovation_scale / std::sqrt(1.0 - spec.persistence * spec.persistence);
  for (int a = 0; a < na; ++a) {
    // Independent substreams per asset and purpose keep the output invariant
    // to generation order.
    SplitMix64 vol_rng = SplitMix64::stream(spec.seed, 2 * static_cast<std::uint64_t>(a));
    SplitMix64 z_rng = SplitMix64::stream(spec.seed, 2 * static_cast<std::uint64_t>(a) + 1);
    SplitMix64 idx_rng = SplitMix64::stream(spec.seed, 1000003ULL + static_cast<std::uint64_t>(a));

    auto& ret = out.returns[a];
    auto& rv = out.rv[a];
    ret.instrument = rv.instrument = panel.assets[a];
    double log_vol = spec.log_vol_mean + stationary_sd * normal_quantile(vol_rng.uniform01());
    for (int t = 0; t < nd; ++t) {
      double vol = std::exp(log_vol);
      double z = draw_innovation(z_rng, spec.law, spec.t_dof);
      double r_next = out.fixed_effects[a] + vol * z;

      const std::size_t row = static_cast<std::size_t>(t) * na + a;
      panel.y[row] = r_next;
      panel.x(row, 0) = vol;
      panel.target_dates[row] = dates[t + 1];

      rv.dates.push_back(dates[t]);
      rv.values.push_back(vol);
      ret.dates.push_back(dates[t + 1]);
      ret.values.push_back(r_next);

      if (spec.with_index) {
        double proxy = vol * std::exp(spec.index_noise * normal_quantile(idx_rng.uniform01()));
        panel.x(row, 1) = proxy;
        out.index[a].instrument = panel.assets[a];
        out.index[a].dates.push_back(dates[t]);
        out.index[a].values.push_back(proxy);
      }

      log_vol = spec.log_vol_mean + spec.persistence * (log_vol - spec.log_vol_mean) +
                spec.innovation_scale * normal_quantile(vol_rng.uniform01());
    }
  }
  panel.validate();
  return out;
}

namespace {

bool lex_smaller_vec(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index l = 0; l < a.size(); ++l) {
    double tol = 1e-12 * (1.0 + std::fabs(b[l]));
    if (a[l] < b[l] - tol) return true;
    if (a[l] > b[l] + tol) return false;
  }
  return false;
}

}  // namespace

OracleResult oracle_qr(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, double tau) {
  const int n = static_cast<int>(design.rows());
  const int k = static_cast<int>(design.cols());
  if (!(tau > 0.0 && tau < 1.0)) throw data_error("oracle_qr: tau must lie in (0,1)");
  if (n > 25 || k > 4) throw data_error("oracle_qr: limited to n <= 25, k <= 4");
  if (n < k) throw data_error("oracle_qr: fewer observations than parameters");

  OracleResult best;
  bool found = false;

  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  Eigen::MatrixXd sub(k, k);
  Eigen::VectorXd sub_y(k);
  for (;;) {
    for (int i = 0; i < k; ++i) {
      sub.row(i) = design.row(idx[i]);
      sub_y[i] = response[idx[i]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (lu.isInvertible()) {
      Eigen::VectorXd theta = lu.solve(sub_y);
      double obj = 0.0;
      for (int i = 0; i < n; ++i) {
        double u = response[i] - design.row(i).dot(theta);
        obj += u * (tau - (u < 0.0 ? 1.0 : 0.0));
      }
      best.bases_evaluated++;
      double tie_tol = 1e-12 * (1.0 + std::fabs(best.objective));
      if (!found || obj < best.objective - tie_tol ||
          (obj <= best.objective + tie_tol && lex_smaller_vec(theta, best.parameters))) {
        best.objective = found ? std::min(best.objective, obj) : obj;
        best.parameters = theta;
        found = true;
      }
    }
    // next combination
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  if (!found) throw numerical_error("oracle_qr: every observation subset is singular");
  return best;
}

}  // namespace panelvar
