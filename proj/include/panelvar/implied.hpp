#pragma once

#include <string>
#include <vector>

#include "panelvar/dates.hpp"

namespace panelvar {

enum class OptionSide { put, call };

struct OptionQuote {
  double strike = 0.0;
  OptionSide side = OptionSide::put;
  double mid = 0.0;  // midpoint of the bid-ask spread
};

struct OptionChainSnapshot {
  double t_years = 0.0;   // time to expiration
  double forward = 0.0;   // forward index level
  double k0 = 0.0;        // first strike at or below the forward
  double rate = 0.0;      // continuously compounded risk-free rate
  std::vector<OptionQuote> quotes;  // strictly increasing strikes, OTM wrt k0

  void validate() const;
};

struct CboeVarianceTerms {
  double strike_sum = 0.0;  // (2/T) Σ ΔK/K² e^{RT} Q(K)
  double correction = 0.0;  // (1/T) (F/K0 - 1)²; exactly 0 when F == K0
  double variance() const { return strike_sum - correction; }
};

// Strike interval ΔK_i: half the distance between the neighbouring strikes,
// or the distance to the single neighbour at either edge.
CboeVarianceTerms cboe_variance_terms(const OptionChainSnapshot& chain);

// Annualized implied variance; throws on an empty chain or a negative result.
double cboe_variance(const OptionChainSnapshot& chain);

// 100 * sqrt(variance).
double index_level(double variance);

// (index / 100) / sqrt(250), the daily-volatility scaling.
double deannualize(double index_annual);

struct VolIndexSeries {
  std::string instrument;
  std::vector<Date> dates;
  std::vector<double> index_annual;  // published level, percent-annualized
  std::vector<double> vol_daily;     // index_annual / (100 sqrt(250))
  std::size_t missing_dropped = 0;
  bool resorted = false;
};

// Published index CSV: header `DATE,<SERIES>`, missing values "." or empty.
VolIndexSeries parse_index_csv(const std::string& path, const std::string& instrument);

// Chain snapshot file: `key=value` header block (T, F, K0, R) followed by a
// `strike,side,mid` CSV table.
OptionChainSnapshot read_chain_csv(const std::string& path);

}  // namespace panelvar
