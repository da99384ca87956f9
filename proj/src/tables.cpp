#include "panelvar/tables.hpp"

#include <algorithm>
#include <cmath>

#include "panelvar/common.hpp"
#include "panelvar/csv.hpp"
#include "panelvar/distributions.hpp"

namespace panelvar {

std::string estimate_cell(double estimate, const std::optional<double>& t_stat) {
  std::string cell = format_fixed(estimate, 3) + " (";
  cell += t_stat ? format_fixed(*t_stat, 2) : "NA";
  cell += ")";
  return cell;
}

std::string tau_percent_label(double tau) { return format_sig(tau * 100.0, 10) + "%"; }

namespace {

std::vector<std::string> header_row(const ModelEstimates& est) {
  std::vector<std::string> h = {"sample", "param"};
  for (double tau : est.taus) h.push_back(tau_percent_label(tau));
  return h;
}

const ParamInference& find_param(const InferenceReport& report, const std::string& name) {
  for (const auto& p : report.params)
    if (p.name == name) return p;
  throw data_error("estimates table: parameter " + name + " missing from the inference report");
}

void emit_param_rows(CsvWriter& w, const ModelEstimates& est, bool include_alphas) {
  std::vector<std::string> params;
  for (const auto& c : est.columns) params.push_back("beta_" + c);
  if (include_alphas)
    for (const auto& a : est.assets) params.push_back("alpha_" + a);
  for (const auto& sample : est.samples) {
    for (const auto& name : params) {
      std::vector<std::string> row = {sample.sample, name};
      for (std::size_t k = 0; k < est.taus.size(); ++k) {
        const auto& p = find_param(sample.inference[k], name);
        row.push_back(estimate_cell(p.estimate, p.t_stat));
      }
      w.row(row);
    }
  }
}

}  // namespace

std::string table_main_csv(const ModelEstimates& est) {
  CsvWriter w;
  w.row(header_row(est));
  emit_param_rows(w, est, false);
  return w.str();
}

std::string table_full_csv(const ModelEstimates& est) {
  CsvWriter w;
  w.row(header_row(est));
  emit_param_rows(w, est, true);
  return w.str();
}

std::string inference_table_csv(const std::vector<double>& taus, std::span<const InferenceReport> reports) {
  if (taus.size() != reports.size()) throw data_error("inference table: tau/report count mismatch");
  CsvWriter w;
  std::vector<std::string> header = {"param"};
  for (double tau : taus) header.push_back(tau_percent_label(tau));
  w.row(header);
  if (reports.empty()) return w.str();
  for (const auto& p0 : reports[0].params) {
    std::vector<std::string> row = {p0.name};
    for (const auto& rep : reports) {
      const auto& p = find_param(rep, p0.name);
      row.push_back(estimate_cell(p.estimate, p.t_stat));
    }
    w.row(row);
  }
  return w.str();
}

nlohmann::ordered_json inference_report_from_parts(const InferenceReport& report) {
  return inference_to_json(report);
}

InferenceReport inference_from_json(const nlohmann::ordered_json& j) {
  InferenceReport report;
  report.tau = j.at("tau").get<double>();
  report.replicates = j.at("replicates").get<int>();
  report.redraws = j.at("redraws").get<int>();
  for (const auto& pj : j.at("params")) {
    ParamInference p;
    p.name = pj.at("name").get<std::string>();
    p.estimate = pj.at("estimate").get<double>();
    if (!pj.at("std_error").is_null()) p.std_error = pj.at("std_error").get<double>();
    if (!pj.at("t_stat").is_null()) p.t_stat = pj.at("t_stat").get<double>();
    p.ci_lo = pj.at("ci_lo").get<double>();
    p.ci_hi = pj.at("ci_hi").get<double>();
    report.params.push_back(std::move(p));
  }
  return report;
}

nlohmann::ordered_json estimates_to_json(const ModelEstimates& est) {
  nlohmann::ordered_json j;
  j["model"] = est.model;
  j["assets"] = est.assets;
  j["columns"] = est.columns;
  j["taus"] = est.taus;
  nlohmann::ordered_json samples = nlohmann::ordered_json::array();
  for (const auto& s : est.samples) {
    nlohmann::ordered_json sj;
    sj["sample"] = s.sample;
    nlohmann::ordered_json fits = nlohmann::ordered_json::array();
    for (const auto& f : s.curve.fits) fits.push_back(fit_to_json(f));
    sj["fits"] = std::move(fits);
    nlohmann::ordered_json inf = nlohmann::ordered_json::array();
    for (const auto& rep : s.inference) inf.push_back(inference_to_json(rep));
    sj["inference"] = std::move(inf);
    sj["crossing"] = {{"pair_violations", s.curve.crossing.pair_violations},
                      {"rows_affected", s.curve.crossing.rows_affected},
                      {"max_gap", s.curve.crossing.max_gap}};
    nlohmann::ordered_json uni;
    for (const auto& [asset, fits_vec] : s.univariate) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& f : fits_vec) arr.push_back(fit_to_json(f));
      uni[asset] = std::move(arr);
    }
    sj["univariate"] = std::move(uni);
    samples.push_back(std::move(sj));
  }
  j["samples"] = std::move(samples);
  return j;
}

ModelEstimates estimates_from_json(const nlohmann::ordered_json& j) {
  ModelEstimates est;
  est.model = j.at("model").get<std::string>();
  est.assets = j.at("assets").get<std::vector<std::string>>();
  est.columns = j.at("columns").get<std::vector<std::string>>();
  est.taus = j.at("taus").get<std::vector<double>>();
  for (const auto& sj : j.at("samples")) {
    SampleEstimates s;
    s.sample = sj.at("sample").get<std::string>();
    for (const auto& fj : sj.at("fits")) s.curve.fits.push_back(fit_from_json(fj));
    for (const auto& ij : sj.at("inference")) s.inference.push_back(inference_from_json(ij));
    const auto& cj = sj.at("crossing");
    s.curve.crossing.pair_violations = cj.at("pair_violations").get<std::size_t>();
    s.curve.crossing.rows_affected = cj.at("rows_affected").get<std::size_t>();
    s.curve.crossing.max_gap = cj.at("max_gap").get<double>();
    const auto& uni = sj.at("univariate");
    for (auto it = uni.begin(); it != uni.end(); ++it) {
      std::vector<QuantileFit> fits;
      for (const auto& fj : it.value()) fits.push_back(fit_from_json(fj));
      s.univariate[it.key()] = std::move(fits);
    }
    est.samples.push_back(std::move(s));
  }
  return est;
}

Band band_for_param(const std::vector<double>& taus, std::span<const InferenceReport> reports,
                    const std::string& param) {
  if (taus.size() != reports.size()) throw data_error("band_for_param: tau/report count mismatch");
  Band band;
  band.param = param;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const auto& p = find_param(reports[k], param);
    band.taus.push_back(taus[k]);
    band.point.push_back(p.estimate);
    band.lo.push_back(p.ci_lo);
    band.hi.push_back(p.ci_hi);
    band.empty.push_back(0);
  }
  return band;
}

namespace {

const SampleEstimates& sample_by_name(const ModelEstimates& est, const std::string& name) {
  for (const auto& s : est.samples)
    if (s.sample == name) return s;
  throw data_error("figure emission: sample '" + name + "' missing from estimates for model " + est.model);
}

std::string beta_param(const ModelEstimates& est, std::size_t col = 0) { return "beta_" + est.columns.at(col); }

}  // namespace

std::string fig_coefficients_csv(const ModelEstimates& est) {
  CsvWriter w;
  std::vector<std::string> header = {"sample", "tau", "beta", "ci_lo", "ci_hi"};
  for (const auto& a : est.assets) header.push_back("uni_" + a);
  w.row(header);
  const std::string param = beta_param(est);
  for (const auto& s : est.samples) {
    Band band = band_for_param(est.taus, s.inference, param);
    for (std::size_t k = 0; k < est.taus.size(); ++k) {
      std::vector<std::string> row = {s.sample, format_sig(est.taus[k]), format_sig(band.point[k]),
                                      format_sig(band.lo[k]), format_sig(band.hi[k])};
      for (const auto& a : est.assets) {
        const auto& fits = s.univariate.at(a);
        row.push_back(format_sig(fits.at(k).beta[0]));
      }
      w.row(row);
    }
  }
  return w.str();
}

std::string fig_normal_overlay_csv(const ModelEstimates& est) {
  CsvWriter w;
  std::vector<std::string> header = {"tau", "gamma"};
  std::vector<Band> bands;
  for (const auto& s : est.samples) {
    header.push_back("beta_" + s.sample);
    header.push_back("lo_" + s.sample);
    header.push_back("hi_" + s.sample);
    bands.push_back(band_for_param(est.taus, s.inference, beta_param(est)));
  }
  header.insert(header.end(), {"inter_lo", "inter_hi", "inter_empty"});
  w.row(header);
  Band inter = intersect_bands(bands);
  for (std::size_t k = 0; k < est.taus.size(); ++k) {
    std::vector<std::string> row = {format_sig(est.taus[k]), format_sig(normal_quantile(est.taus[k]))};
    for (const auto& band : bands) {
      row.push_back(format_sig(band.point[k]));
      row.push_back(format_sig(band.lo[k]));
      row.push_back(format_sig(band.hi[k]));
    }
    row.push_back(format_sig(inter.lo[k]));
    row.push_back(format_sig(inter.hi[k]));
    row.push_back(inter.empty[k] ? "1" : "0");
    w.row(row);
  }
  return w.str();
}

std::string fig_model_comparison_csv(const ModelEstimates& rv, const ModelEstimates& index,
                                     const ModelEstimates& both) {
  CsvWriter w;
  std::vector<std::string> header = {"model", "param", "tau", "beta", "ci_lo", "ci_hi"};
  for (const auto& a : both.assets) header.push_back("uni_" + a);
  w.row(header);
  auto emit = [&](const ModelEstimates& est) {
    const SampleEstimates& full = sample_by_name(est, "full");
    for (std::size_t c = 0; c < est.columns.size(); ++c) {
      Band band = band_for_param(est.taus, full.inference, beta_param(est, c));
      for (std::size_t k = 0; k < est.taus.size(); ++k) {
        std::vector<std::string> row = {est.model,          beta_param(est, c),      format_sig(est.taus[k]),
                                        format_sig(band.point[k]), format_sig(band.lo[k]), format_sig(band.hi[k])};
        for (const auto& a : both.assets) {
          if (std::find(est.assets.begin(), est.assets.end(), a) == est.assets.end()) {
            row.push_back("");
            continue;
          }
          const auto& fits = full.univariate.at(a);
          row.push_back(format_sig(fits.at(k).beta[static_cast<Eigen::Index>(c)]));
        }
        w.row(row);
      }
    }
  };
  emit(rv);
  emit(index);
  emit(both);
  return w.str();
}

std::string fig_normal_overlay_models_csv(const ModelEstimates& rv, const ModelEstimates& index) {
  if (rv.taus != index.taus) throw data_error("figure emission: rv and index tau grids differ");
  CsvWriter w;
  w.row({"tau", "gamma", "beta_rv", "lo_rv", "hi_rv", "beta_index", "lo_index", "hi_index", "inter_lo", "inter_hi",
         "inter_empty"});
  Band rv_band = band_for_param(rv.taus, sample_by_name(rv, "full").inference, beta_param(rv));
  Band index_band = band_for_param(index.taus, sample_by_name(index, "full").inference, beta_param(index));
  // The intersection is across models for the same conceptual slope curve.
  Band renamed = index_band;
  renamed.param = rv_band.param;
  std::vector<Band> bands = {rv_band, renamed};
  Band inter = intersect_bands(bands);
  for (std::size_t k = 0; k < rv.taus.size(); ++k) {
    w.row({format_sig(rv.taus[k]), format_sig(normal_quantile(rv.taus[k])), format_sig(rv_band.point[k]),
           format_sig(rv_band.lo[k]), format_sig(rv_band.hi[k]), format_sig(index_band.point[k]),
           format_sig(index_band.lo[k]), format_sig(index_band.hi[k]), format_sig(inter.lo[k]),
           format_sig(inter.hi[k]), inter.empty[k] ? "1" : "0"});
  }
  return w.str();
}

std::string descriptive_stats_csv(std::span<const StatsRow> rows) {
  CsvWriter w;
  w.row({"series", "instrument", "mean", "st_dev", "skewness", "excess_kurtosis", "median", "minimum", "maximum"});
  for (const auto& r : rows) {
    w.row({r.series, r.instrument, format_sig(r.stats.mean), format_sig(r.stats.st_dev),
           r.stats.skewness ? format_sig(*r.stats.skewness) : "",
           r.stats.excess_kurtosis ? format_sig(*r.stats.excess_kurtosis) : "", format_sig(r.stats.median),
           format_sig(r.stats.minimum), format_sig(r.stats.maximum)});
  }
  return w.str();
}

}  // namespace panelvar
