#include "panelvar/panel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "panelvar/common.hpp"

namespace panelvar {

void PanelDataset::validate() const {
  const std::size_t n = n_dates() * n_assets();
  if (assets.empty() || dates.empty()) throw data_error("panel: empty asset or date axis");
  if (static_cast<std::size_t>(y.size()) != n || static_cast<std::size_t>(x.rows()) != n ||
      static_cast<std::size_t>(x.cols()) != columns.size() || target_dates.size() != n)
    throw data_error("panel: inconsistent shapes");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i]))
      throw data_error("panel: missing return for asset " + assets[i % assets.size()] + " on regressor date " +
                       dates[i / assets.size()].to_string());
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (!std::isfinite(x(i, c)))
        throw data_error("panel: missing " + columns[c] + " for asset " + assets[i % assets.size()] + " on " +
                         dates[i / assets.size()].to_string());
  }
}

PanelDataset PanelDataset::select_dates(const std::vector<std::size_t>& date_idx) const {
  PanelDataset out;
  out.assets = assets;
  out.columns = columns;
  const std::size_t na = assets.size();
  out.dates.reserve(date_idx.size());
  out.y.resize(date_idx.size() * na);
  out.x.resize(date_idx.size() * na, x.cols());
  out.target_dates.reserve(date_idx.size() * na);
  for (std::size_t k = 0; k < date_idx.size(); ++k) {
    const std::size_t d = date_idx[k];
    out.dates.push_back(dates[d]);
    for (std::size_t a = 0; a < na; ++a) {
      out.y[k * na + a] = y[d * na + a];
      out.x.row(k * na + a) = x.row(d * na + a);
      out.target_dates.push_back(target_dates[d * na + a]);
    }
  }
  return out;
}

PanelDataset PanelDataset::select_asset(std::size_t asset_idx) const {
  PanelDataset out;
  out.assets = {assets.at(asset_idx)};
  out.columns = columns;
  out.dates = dates;
  const std::size_t na = assets.size();
  const std::size_t nd = dates.size();
  out.y.resize(nd);
  out.x.resize(nd, x.cols());
  out.target_dates.reserve(nd);
  for (std::size_t d = 0; d < nd; ++d) {
    out.y[d] = y[d * na + asset_idx];
    out.x.row(d) = x.row(d * na + asset_idx);
    out.target_dates.push_back(target_dates[d * na + asset_idx]);
  }
  return out;
}

std::pair<PanelDataset, PanelDataset> PanelDataset::split(Date boundary_pre, Date boundary_post) const {
  if (boundary_post <= boundary_pre) throw data_error("panel split: post boundary must follow pre boundary");
  std::vector<std::size_t> pre, post;
  for (std::size_t d = 0; d < dates.size(); ++d) {
    if (dates[d] <= boundary_pre)
      pre.push_back(d);
    else if (dates[d] >= boundary_post)
      post.push_back(d);
  }
  if (pre.empty() || post.empty())
    throw data_error("panel split: boundary " + boundary_pre.to_string() + ":" + boundary_post.to_string() +
                     " leaves an empty sub-sample");
  return {select_dates(pre), select_dates(post)};
}

PanelDataset build_panel(const std::vector<DatedSeries>& returns,
                         const std::vector<std::pair<std::string, std::vector<DatedSeries>>>& regressors) {
  if (returns.empty()) throw data_error("build_panel: no return series");
  if (regressors.empty()) throw data_error("build_panel: no regressor columns");

  // Assets = intersection of instruments present in returns and every
  // regressor column, in sorted order.
  std::set<std::string> asset_set;
  for (const auto& r : returns) asset_set.insert(r.instrument);
  for (const auto& [col, series_vec] : regressors) {
    std::set<std::string> have;
    for (const auto& s : series_vec) have.insert(s.instrument);
    std::set<std::string> keep;
    std::set_intersection(asset_set.begin(), asset_set.end(), have.begin(), have.end(),
                          std::inserter(keep, keep.begin()));
    asset_set = std::move(keep);
  }
  if (asset_set.empty()) throw data_error("build_panel: no instrument present in all inputs");
  std::vector<std::string> assets(asset_set.begin(), asset_set.end());

  auto find_series = [](const std::vector<DatedSeries>& v, const std::string& inst) -> const DatedSeries& {
    for (const auto& s : v)
      if (s.instrument == inst) return s;
    throw data_error("build_panel: missing series for " + inst);
  };

  // Per asset: regressor date -> (x row, matched return, return date).
  struct Obs {
    std::vector<double> x;
    double y;
    Date target;
  };
  std::vector<std::map<Date, Obs>> per_asset(assets.size());
  for (std::size_t a = 0; a < assets.size(); ++a) {
    const DatedSeries& ret = find_series(returns, assets[a]);
    if (ret.dates.size() < 2) throw data_error("build_panel: fewer than two return dates for " + assets[a]);
    // Candidate dates: regressor dates of the first column.
    const DatedSeries& first_col = find_series(regressors[0].second, assets[a]);
    for (std::size_t i = 0; i < first_col.dates.size(); ++i) {
      Date t = first_col.dates[i];
      // Next return date strictly after t in this asset's own calendar.
      auto it = std::upper_bound(ret.dates.begin(), ret.dates.end(), t);
      if (it == ret.dates.end()) continue;
      Obs obs;
      obs.target = *it;
      obs.y = ret.values[static_cast<std::size_t>(it - ret.dates.begin())];
      obs.x.push_back(first_col.values[i]);
      bool complete = true;
      for (std::size_t c = 1; c < regressors.size(); ++c) {
        const DatedSeries& col = find_series(regressors[c].second, assets[a]);
        auto dit = std::lower_bound(col.dates.begin(), col.dates.end(), t);
        if (dit == col.dates.end() || *dit != t) {
          complete = false;
          break;
        }
        obs.x.push_back(col.values[static_cast<std::size_t>(dit - col.dates.begin())]);
      }
      if (complete) per_asset[a].emplace(t, std::move(obs));
    }
    if (per_asset[a].empty()) throw data_error("build_panel: no usable observations for " + assets[a]);
  }

  // Common dates across assets keep the panel balanced.
  std::vector<Date> common;
  for (const auto& [d, obs] : per_asset[0]) {
    bool everywhere = true;
    for (std::size_t a = 1; a < assets.size() && everywhere; ++a) everywhere = per_asset[a].count(d) > 0;
    if (everywhere) common.push_back(d);
  }
  if (common.empty()) throw data_error("build_panel: no common dates across assets");

  PanelDataset panel;
  panel.assets = assets;
  panel.dates = common;
  for (const auto& [col, series_vec] : regressors) panel.columns.push_back(col);
  const std::size_t n = common.size() * assets.size();
  panel.y.resize(n);
  panel.x.resize(n, static_cast<Eigen::Index>(regressors.size()));
  panel.target_dates.resize(n);
  for (std::size_t d = 0; d < common.size(); ++d) {
    for (std::size_t a = 0; a < assets.size(); ++a) {
      const Obs& obs = per_asset[a].at(common[d]);
      const std::size_t r = d * assets.size() + a;
      panel.y[r] = obs.y;
      for (std::size_t c = 0; c < obs.x.size(); ++c) panel.x(r, c) = obs.x[c];
      panel.target_dates[r] = obs.target;
    }
  }
  panel.validate();
  return panel;
}

}  // namespace panelvar
