#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trendshift/ar_errors.hpp"
#include "trendshift/data_io.hpp"
#include "trendshift/diagnostics.hpp"
#include "trendshift/penalty.hpp"
#include "trendshift/segmentation.hpp"
#include "trendshift/surge_test.hpp"
#include "trendshift/trend_fit.hpp"

namespace py = pybind11;
using namespace trendshift;

namespace {

using Values = std::vector<double>;

ModelSpec make_spec(const std::string& trend, const std::string& errors, int ar_order, int min_seg_len, int max_m,
                    std::optional<double> penalty_weight, std::optional<std::string> search) {
  ModelSpec s;
  if (trend == "continuous") {
    s.trend = TrendKind::continuous;
  } else if (trend == "discontinuous") {
    s.trend = TrendKind::discontinuous;
  } else {
    throw DomainError("trend must be 'continuous' or 'discontinuous'");
  }
  if (errors == "independent") {
    s.errors = ErrorKind::independent;
  } else if (errors == "global_ar") {
    s.errors = ErrorKind::global_ar;
  } else if (errors == "piecewise_ar1") {
    s.errors = ErrorKind::piecewise_ar1;
  } else {
    throw DomainError("errors must be 'independent', 'global_ar' or 'piecewise_ar1'");
  }
  s.ar_order = ar_order;
  s.min_seg_len = min_seg_len;
  s.max_m = max_m;
  if (penalty_weight) {
    s.penalty = PenaltyKind::manual;
    s.penalty_weight = *penalty_weight;
  }
  if (search) {
    if (*search == "pelt") {
      s.search = SearchKind::pelt;
    } else if (*search == "exact_dp") {
      s.search = SearchKind::exact_dp;
    } else if (*search == "exhaustive") {
      s.search = SearchKind::exhaustive;
    } else {
      throw DomainError("search must be 'pelt', 'exact_dp' or 'exhaustive'");
    }
  } else {
    s.search = default_search(s);
  }
  s.validate();
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Trend changepoints and warming-surge tests for annual series";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DegenerateError>(m, "DegenerateError", PyExc_ArithmeticError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init(&make_spec), py::arg("trend") = "continuous", py::arg("errors") = "piecewise_ar1",
           py::arg("ar_order") = 1, py::arg("min_seg_len") = 10, py::arg("max_m") = 5,
           py::arg("penalty_weight") = py::none(), py::arg("search") = py::none())
      .def_property_readonly("trend", [](const ModelSpec& s) { return to_string(s.trend); })
      .def_property_readonly("errors", [](const ModelSpec& s) { return to_string(s.errors); })
      .def_property_readonly("search", [](const ModelSpec& s) { return to_string(s.search); })
      .def_readonly("ar_order", &ModelSpec::ar_order)
      .def_readonly("min_seg_len", &ModelSpec::min_seg_len)
      .def_readonly("max_m", &ModelSpec::max_m)
      .def("__repr__", [](const ModelSpec& s) { return "ModelSpec(" + describe(s) + ")"; });

  py::class_<AnnualSeries>(m, "AnnualSeries")
      .def(py::init<int, Values, std::string, std::string>(), py::arg("start_year"), py::arg("values"),
           py::arg("label") = "", py::arg("baseline") = "")
      .def_property_readonly("start_year", &AnnualSeries::start_year)
      .def_property_readonly("end_year", &AnnualSeries::end_year)
      .def_property_readonly("values", [](const AnnualSeries& s) { return Values(s.values().begin(), s.values().end()); })
      .def_property_readonly("label", &AnnualSeries::label)
      .def_property_readonly("baseline", &AnnualSeries::baseline)
      .def("index_of", &AnnualSeries::index_of)
      .def("year_of", &AnnualSeries::year_of)
      .def("slice", &AnnualSeries::slice)
      .def("__len__", &AnnualSeries::size);

  m.def(
      "load",
      [](const std::string& path, const std::string& source, int year_from, int year_to) {
        DatasetDescriptor d;
        d.source = parse_source(source);
        d.path_or_url = path;
        d.year_from = year_from;
        d.year_to = year_to;
        return ingest(d);
      },
      py::arg("path"), py::arg("source") = "normalized", py::arg("year_from") = 0, py::arg("year_to") = 0,
      "Read a dataset file (or http/https URL) in one of the supported layouts.");
  m.def(
      "parse",
      [](const std::string& text, const std::string& source) { return parse_dataset(text, parse_source(source)); },
      py::arg("text"), py::arg("source") = "normalized");
  m.def("format_normalized", &format_normalized);

  py::class_<FitResult>(m, "FitResult")
      .def_property_readonly("changepoints", [](const FitResult& f) { return f.seg.taus(); })
      .def_readonly("alphas", &FitResult::alphas)
      .def_readonly("betas", &FitResult::betas)
      .def_readonly("phis", &FitResult::phis)
      .def_readonly("sigmas", &FitResult::sigmas)
      .def_readonly("loglik", &FitResult::loglik)
      .def_readonly("objective", &FitResult::objective)
      .def_readonly("parameter_count", &FitResult::parameter_count)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("fitted", &FitResult::fitted)
      .def_readonly("residuals", &FitResult::residuals)
      .def_readonly("innovations", &FitResult::innovations)
      .def("continuity_gap", &FitResult::continuity_gap);

  m.def(
      "fit_at",
      [](const Values& y, std::vector<int> taus, const ModelSpec& spec) {
        return fit_at(y, Segmentation(y.size(), std::move(taus)), spec);
      },
      py::arg("values"), py::arg("changepoints"), py::arg("spec"),
      "Joint maximum-likelihood fit at fixed changepoint times (1-based).");
  m.def(
      "detect",
      [](const Values& y, const ModelSpec& spec) {
        py::gil_scoped_release release;
        return detect(y, spec).fit;
      },
      py::arg("values"), py::arg("spec"), "Penalized-likelihood changepoint search, returning the refitted winner.");
  m.def(
      "exhaustive_search",
      [](const Values& y, const ModelSpec& spec) {
        const auto r = exhaustive_search(y, spec);
        return py::make_tuple(r.seg.taus(), r.objective);
      },
      py::arg("values"), py::arg("spec"));
  m.def("parameter_count", &parameter_count, py::arg("m"), py::arg("spec"));
  m.def("penalty_value", &penalty_value, py::arg("m"), py::arg("spec"), py::arg("n"));

  m.def(
      "ar_loglik", [](const Values& e, const Values& phis, double sigma) { return ar_loglik(e, ArModel{phis, sigma}); },
      py::arg("eps"), py::arg("phis"), py::arg("sigma"));
  m.def(
      "fit_ar",
      [](const Values& e, int p) {
        const auto f = fit_ar(e, p);
        return py::make_tuple(f.model.phis, f.model.sigma, f.loglik);
      },
      py::arg("eps"), py::arg("p"), "Exact AR(p) maximum likelihood: (phis, sigma, loglik).");
  m.def(
      "simulate_ar1",
      [](double phi, double sigma, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
        RandomStream rng(seed, stream);
        return simulate_ar1(ArModel{{phi}, sigma}, n, rng);
      },
      py::arg("phi"), py::arg("sigma"), py::arg("n"), py::arg("seed"), py::arg("stream") = 0);

  py::class_<PortmanteauResult>(m, "PortmanteauResult")
      .def_readonly("statistic", &PortmanteauResult::statistic)
      .def_readonly("p_value", &PortmanteauResult::p_value)
      .def_readonly("max_lag", &PortmanteauResult::max_lag)
      .def_readonly("fitted_order", &PortmanteauResult::fitted_order);
  py::class_<NormalityResult>(m, "NormalityResult")
      .def_readonly("w", &NormalityResult::w)
      .def_readonly("p_value", &NormalityResult::p_value);
  py::class_<DiagnosticsReport>(m, "DiagnosticsReport")
      .def_readonly("whiteness", &DiagnosticsReport::whiteness)
      .def_readonly("normality", &DiagnosticsReport::normality)
      .def_readonly("acf", &DiagnosticsReport::acf)
      .def_readonly("acf_band", &DiagnosticsReport::acf_band)
      .def_property_readonly("rejected", &DiagnosticsReport::rejected);
  m.def(
      "fisher_gallagher_test", [](const Values& r, int lags, int p) { return fisher_gallagher_test(r, lags, p); },
      py::arg("residuals"), py::arg("max_lag"), py::arg("fitted_order") = 0);
  m.def("shapiro_wilk", [](const Values& x) { return shapiro_wilk(x); }, py::arg("sample"));
  m.def("diagnose", &diagnose, py::arg("fit"), py::arg("max_lag") = 0);

  py::class_<NullParams>(m, "NullParams")
      .def(py::init([](double alpha1, double beta1, double phi, double sigma, int n) {
             NullParams p{alpha1, beta1, phi, sigma, n};
             p.validate();
             return p;
           }),
           py::arg("alpha1"), py::arg("beta1"), py::arg("phi"), py::arg("sigma"), py::arg("n"))
      .def_readonly("alpha1", &NullParams::alpha1)
      .def_readonly("beta1", &NullParams::beta1)
      .def_readonly("phi", &NullParams::phi)
      .def_readonly("sigma", &NullParams::sigma)
      .def_readonly("n", &NullParams::n);
  m.def("null_preset", &null_preset, py::arg("name"), py::arg("n"));

  py::class_<QuantileEstimate>(m, "QuantileEstimate")
      .def_readonly("q", &QuantileEstimate::q)
      .def_readonly("mc_se", &QuantileEstimate::mc_se)
      .def_readonly("level", &QuantileEstimate::level)
      .def_readonly("reps", &QuantileEstimate::reps);
  m.def("t_statistic", [](const Values& y, int k) { return t_statistic(y, k); }, py::arg("values"), py::arg("k"));
  m.def(
      "t_max",
      [](const Values& y) {
        const auto r = t_max(y);
        return py::make_tuple(r.t, r.k, r.signed_t);
      },
      py::arg("values"), "max |T_k| over the admissible range: (t, k, signed t).");
  m.def("fixed_k_critical_value", &fixed_k_critical_value, py::arg("n"), py::arg("level") = 0.05);
  m.def(
      "mc_null_quantile",
      [](const NullParams& null, int reps, double level, std::uint64_t seed, int threads) {
        py::gil_scoped_release release;
        return mc_null_quantile(null, reps, level, seed, threads);
      },
      py::arg("null"), py::arg("reps"), py::arg("level") = 0.95, py::arg("seed") = 20240101, py::arg("threads") = 0);
  m.def(
      "min_detectable_slope",
      [](const NullParams& null, double baseline, int k, int n, double q) {
        const auto r = min_detectable_slope(null, baseline, k, n, q);
        return py::make_tuple(r.slope, r.pct, r.sd);
      },
      py::arg("null"), py::arg("baseline_slope"), py::arg("k"), py::arg("n"), py::arg("q"),
      "(slope, pct, sd) of the smallest detectable post-surge slope.");
  m.def(
      "baseline_slopes",
      [](const AnnualSeries& s, const std::vector<int>& years) { return baseline_slopes(s, years); },
      py::arg("series"), py::arg("surge_years"));
  m.def(
      "surge_grid",
      [](const NullParams& null, const Values& baseline, int start_year, const std::vector<int>& surge,
         const std::vector<int>& vantage, int reps, std::uint64_t seed, int threads, double level) {
        SurgeGrid g;
        {
          py::gil_scoped_release release;
          g = surge_grid(null, baseline, start_year, surge, vantage, reps, seed, threads, level);
        }
        py::dict out;
        out["surge_years"] = g.surge_years;
        out["vantage_years"] = g.vantage_years;
        out["baseline"] = g.baseline;
        std::vector<double> q;
        for (const auto& e : g.quantiles) q.push_back(e.q);
        out["quantiles"] = q;
        out["min_pct"] = g.min_pct;
        out["min_slope"] = g.min_slope;
        return out;
      },
      py::arg("null"), py::arg("baseline"), py::arg("start_year"), py::arg("surge_years"), py::arg("vantage_years"),
      py::arg("reps"), py::arg("seed") = 20240101, py::arg("threads") = 0, py::arg("level") = 0.95);
}
