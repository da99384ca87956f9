#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "panelvar/dates.hpp"
#include "panelvar/marketdata.hpp"

namespace panelvar {

// Balanced date x asset panel. Row layout is date-major: observation
// (date d, asset a) lives at row d * n_assets + a. `y` holds the next
// trading day's return; `x` holds the regressors observed at the row's date.
struct PanelDataset {
  std::vector<std::string> assets;
  std::vector<Date> dates;          // regressor dates t
  std::vector<std::string> columns; // regressor names
  Eigen::VectorXd y;                // r_{i,t+1}
  Eigen::MatrixXd x;                // n_obs x columns
  std::vector<Date> target_dates;   // per row: the date of the matched return

  std::size_t n_assets() const { return assets.size(); }
  std::size_t n_dates() const { return dates.size(); }
  std::size_t n_obs() const { return static_cast<std::size_t>(y.size()); }
  std::size_t row(std::size_t date_idx, std::size_t asset_idx) const {
    return date_idx * assets.size() + asset_idx;
  }

  void validate() const;  // shape + no-NaN checks

  // New panel containing the given date indices in the given order
  // (duplicates allowed; used by sample splits and the bootstrap).
  PanelDataset select_dates(const std::vector<std::size_t>& date_idx) const;

  // Single-asset slice; the asset keeps its name.
  PanelDataset select_asset(std::size_t asset_idx) const;

  // pre: dates <= boundary; post: dates >= boundary_post.
  std::pair<PanelDataset, PanelDataset> split(Date boundary_pre, Date boundary_post) const;
};

// Builds the balanced panel: for every asset, the regressor observed on
// trading date t is matched with the return on that asset's next available
// return date; dates without a complete regressor set or missing in any
// asset are dropped.
PanelDataset build_panel(const std::vector<DatedSeries>& returns,
                         const std::vector<std::pair<std::string, std::vector<DatedSeries>>>& regressors);

}  // namespace panelvar
