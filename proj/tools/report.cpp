#include "report.hpp"

#include <fstream>
#include <stdexcept>

namespace trendshift::report {

ordered_json series_json(const AnnualSeries& s) {
  return ordered_json{{"label", s.label()},
                      {"start_year", s.start_year()},
                      {"end_year", s.end_year()},
                      {"n", s.size()},
                      {"baseline", s.baseline()}};
}

ordered_json spec_json(const ModelSpec& spec) {
  ordered_json j;
  j["trend"] = to_string(spec.trend);
  j["errors"] = to_string(spec.errors);
  j["ar_order"] = spec.error_order();
  j["penalty"] = spec.penalty == PenaltyKind::bic ? "bic" : "manual";
  if (spec.penalty == PenaltyKind::manual) j["penalty_weight"] = spec.penalty_weight;
  j["min_seg_len"] = spec.min_seg_len;
  j["search"] = to_string(spec.search);
  j["max_m"] = spec.max_m;
  return j;
}

ordered_json fit_json(const FitResult& fit, const AnnualSeries& s) {
  ordered_json j;
  j["model"] = describe(fit.spec);
  ordered_json years = ordered_json::array();
  for (int t : fit.seg.taus()) years.push_back(s.year_of(t));
  j["changepoints"] = years;
  ordered_json segs = ordered_json::array();
  const bool piecewise = fit.phis.size() > 1 || fit.spec.errors == ErrorKind::piecewise_ar1;
  for (std::size_t i = 1; i <= fit.seg.segment_count(); ++i) {
    ordered_json seg;
    seg["start_year"] = s.year_of(fit.seg.boundary(i - 1) + 1);
    seg["end_year"] = s.year_of(fit.seg.boundary(i));
    // trend on this segment is alpha + beta * t with t = 1 at the first year
    seg["alpha"] = fit.alphas[i - 1];
    seg["beta"] = fit.betas[i - 1];
    if (piecewise) {
      seg["phi"] = fit.phis[i - 1];
      seg["sigma"] = fit.sigmas[i - 1];
    }
    segs.push_back(seg);
  }
  j["segments"] = segs;
  if (!piecewise) {
    j["phi"] = fit.phis.empty() ? std::vector<double>{} : fit.phis[0];
    j["sigma"] = fit.sigmas.empty() ? 0.0 : fit.sigmas[0];
  }
  j["loglik"] = fit.loglik;
  j["objective"] = fit.objective;
  j["parameter_count"] = fit.parameter_count;
  j["iterations"] = fit.iterations;
  if (fit.spec.trend == TrendKind::continuous) j["continuity_gap"] = fit.continuity_gap();
  return j;
}

ordered_json search_json(const SearchStats& stats) {
  return ordered_json{
      {"fits", stats.fits}, {"segment_costs", stats.segment_costs}, {"failed_fits", stats.failed_fits}};
}

ordered_json diagnostics_json(const DiagnosticsReport& d) {
  ordered_json j;
  j["fisher_gallagher"] = {{"statistic", d.whiteness.statistic},
                           {"p_value", d.whiteness.p_value},
                           {"max_lag", d.whiteness.max_lag},
                           {"fitted_order", d.whiteness.fitted_order},
                           {"gamma_shape", d.whiteness.shape},
                           {"gamma_scale", d.whiteness.scale},
                           {"rejected", d.whiteness_rejected}};
  j["shapiro_wilk"] = {{"w", d.normality.w}, {"p_value", d.normality.p_value}, {"rejected", d.normality_rejected}};
  j["acf"] = d.acf;
  j["acf_band"] = d.acf_band;
  j["reject_level"] = kRejectLevel;
  j["rejected"] = d.rejected();
  return j;
}

ordered_json quantile_json(const QuantileEstimate& q) {
  return ordered_json{{"q", q.q}, {"mc_se", q.mc_se}, {"level", q.level}, {"reps", q.reps}};
}

ordered_json null_json(const NullParams& p) {
  return ordered_json{{"alpha1", p.alpha1}, {"beta1", p.beta1}, {"phi", p.phi}, {"sigma", p.sigma}, {"n", p.n}};
}

ordered_json grid_json(const SurgeGrid& g) {
  ordered_json j;
  j["start_year"] = g.start_year;
  j["surge_years"] = g.surge_years;
  j["vantage_years"] = g.vantage_years;
  j["baseline_slope"] = g.baseline;
  ordered_json qs = ordered_json::array();
  for (const auto& q : g.quantiles) qs.push_back(quantile_json(q));
  j["quantiles"] = qs;
  j["min_pct"] = g.min_pct;
  j["min_slope"] = g.min_slope;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace trendshift::report
