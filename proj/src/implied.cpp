#include "panelvar/implied.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "panelvar/common.hpp"
#include "panelvar/csv.hpp"

namespace panelvar {

void OptionChainSnapshot::validate() const {
  if (!(t_years > 0.0)) throw data_error("option chain: T must be positive");
  if (!(forward > 0.0)) throw data_error("option chain: forward must be positive");
  if (!(k0 > 0.0) || k0 > forward) throw data_error("option chain: K0 must be positive and not above the forward");
  if (quotes.empty()) throw data_error("option chain: no quotes");
  for (std::size_t i = 0; i < quotes.size(); ++i) {
    const auto& q = quotes[i];
    if (!(q.strike > 0.0)) throw data_error("option chain: strikes must be positive");
    if (q.mid < 0.0) throw data_error("option chain: quote mid must be non-negative");
    if (i > 0 && !(quotes[i - 1].strike < q.strike))
      throw data_error("option chain: strikes must be strictly increasing");
    if (q.strike > k0 && q.side != OptionSide::call)
      throw data_error("option chain: strike above K0 must be a call");
    if (q.strike < k0 && q.side != OptionSide::put)
      throw data_error("option chain: strike below K0 must be a put");
  }
}

CboeVarianceTerms cboe_variance_terms(const OptionChainSnapshot& chain) {
  chain.validate();
  const auto& q = chain.quotes;
  const double discount = std::exp(chain.rate * chain.t_years);
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    double dk;
    if (q.size() == 1)
      dk = q[0].strike;  // degenerate single-strike chain: use the strike itself
    else if (i == 0)
      dk = q[1].strike - q[0].strike;
    else if (i + 1 == q.size())
      dk = q[i].strike - q[i - 1].strike;
    else
      dk = 0.5 * (q[i + 1].strike - q[i - 1].strike);
    sum += dk / (q[i].strike * q[i].strike) * discount * q[i].mid;
  }
  CboeVarianceTerms terms;
  terms.strike_sum = 2.0 / chain.t_years * sum;
  const double moneyness = chain.forward / chain.k0 - 1.0;
  terms.correction = moneyness * moneyness / chain.t_years;
  return terms;
}

double cboe_variance(const OptionChainSnapshot& chain) {
  const double v = cboe_variance_terms(chain).variance();
  if (v < 0.0) throw numerical_error("cboe_variance: negative variance (degenerate chain)");
  return v;
}

double index_level(double variance) {
  if (variance < 0.0) throw data_error("index_level: variance must be non-negative");
  return 100.0 * std::sqrt(variance);
}

double deannualize(double index_annual) {
  if (index_annual < 0.0) throw data_error("deannualize: index must be non-negative");
  return index_annual / 100.0 / std::sqrt(250.0);
}

VolIndexSeries parse_index_csv(const std::string& path, const std::string& instrument) {
  auto rows = read_csv(path);
  if (rows.empty() || rows[0].size() != 2 || rows[0][0] != "DATE")
    throw data_error(path + ": expected header 'DATE,<SERIES>'");
  VolIndexSeries out;
  out.instrument = instrument;
  std::vector<std::pair<Date, double>> parsed;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 2) throw data_error(path + " row " + std::to_string(r + 1) + ": expected 2 fields");
    if (row[1] == "." || row[1].empty()) {
      out.missing_dropped++;
      continue;
    }
    try {
      Date d = Date::parse(row[0]);
      std::size_t used = 0;
      double level = std::stod(row[1], &used);
      if (used != row[1].size()) throw data_error("trailing characters");
      if (level < 0.0) throw data_error("negative index level");
      parsed.emplace_back(d, level);
    } catch (const std::invalid_argument&) {
      throw data_error(path + " row " + std::to_string(r + 1) + ": unparseable number '" + row[1] + "'");
    } catch (const std::out_of_range&) {
      throw data_error(path + " row " + std::to_string(r + 1) + ": number out of range '" + row[1] + "'");
    } catch (const data_error& e) {
      throw data_error(path + " row " + std::to_string(r + 1) + ": " + std::string(e.what()));
    }
  }
  if (!std::is_sorted(parsed.begin(), parsed.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; })) {
    std::stable_sort(parsed.begin(), parsed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    out.resorted = true;
  }
  for (std::size_t i = 1; i < parsed.size(); ++i)
    if (parsed[i - 1].first == parsed[i].first)
      throw data_error(path + ": duplicate date " + parsed[i].first.to_string());
  for (const auto& [d, level] : parsed) {
    out.dates.push_back(d);
    out.index_annual.push_back(level);
    out.vol_daily.push_back(deannualize(level));
  }
  return out;
}

OptionChainSnapshot read_chain_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  OptionChainSnapshot chain;
  bool have_t = false, have_f = false, have_k0 = false;
  std::string line;
  int line_no = 0;
  // key=value header block, then the quote table.
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) break;
    std::string key = line.substr(0, eq);
    double value;
    try {
      value = std::stod(line.substr(eq + 1));
    } catch (const std::exception&) {
      throw data_error(path + " line " + std::to_string(line_no) + ": unparseable value");
    }
    if (key == "T") {
      chain.t_years = value;
      have_t = true;
    } else if (key == "F") {
      chain.forward = value;
      have_f = true;
    } else if (key == "K0") {
      chain.k0 = value;
      have_k0 = true;
    } else if (key == "R") {
      chain.rate = value;
    } else {
      throw data_error(path + " line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (!have_t || !have_f || !have_k0) throw data_error(path + ": header must set T, F and K0");
  if (line != "strike,side,mid") throw data_error(path + ": expected 'strike,side,mid' table header");
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = parse_csv(line + "\n");
    if (fields.size() != 1 || fields[0].size() != 3)
      throw data_error(path + " line " + std::to_string(line_no) + ": expected 3 fields");
    OptionQuote q;
    try {
      q.strike = std::stod(fields[0][0]);
      q.mid = std::stod(fields[0][2]);
    } catch (const std::exception&) {
      throw data_error(path + " line " + std::to_string(line_no) + ": unparseable number");
    }
    if (fields[0][1] == "put")
      q.side = OptionSide::put;
    else if (fields[0][1] == "call")
      q.side = OptionSide::call;
    else
      throw data_error(path + " line " + std::to_string(line_no) + ": side must be put or call");
    chain.quotes.push_back(q);
  }
  chain.validate();
  return chain;
}

}  // namespace panelvar
