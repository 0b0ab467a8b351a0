// trendshift command-line front end.
//
// Exit codes: 0 success, 2 usage / configuration / input errors, 3 numerical
// failures (non-convergence, degenerate fits).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "report.hpp"
#include "svg.hpp"
#include "trendshift/ar_errors.hpp"
#include "trendshift/data_io.hpp"
#include "trendshift/diagnostics.hpp"
#include "trendshift/parallel.hpp"
#include "trendshift/segmentation.hpp"
#include "trendshift/surge_test.hpp"

namespace fs = std::filesystem;
using namespace trendshift;
using report::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct Common {
  std::string out_dir = ".";
  std::uint64_t seed = 20240101;
  int threads = 0;
};

struct DataOptions {
  std::string path;
  std::string url;
  std::string format = "auto";
  int from_year = 0;
  int to_year = 0;
  std::string label;

  void add(CLI::App* app, int default_from = 0) {
    from_year = default_from;
    app->add_option("--data", path, "dataset file");
    app->add_option("--url", url, "download the dataset instead of reading --data");
    app->add_option("--format", format, "hadcrut | noaa | berkeley | nasa | normalized | auto")->capture_default_str();
    app->add_option("--from-year", from_year, "first calendar year used (0: file start)")->capture_default_str();
    app->add_option("--to-year", to_year, "last calendar year used (0: file end)")->capture_default_str();
    app->add_option("--label", label, "dataset label for reports");
  }

  bool given() const { return !path.empty() || !url.empty(); }

  DataSource source() const {
    if (format != "auto") return parse_source(format);
    const std::string name = fs::path(url.empty() ? path : url).filename().string();
    const auto has = [&](const char* s) { return name.find(s) != std::string::npos; };
    if (has("HadCRUT") || has("hadcrut")) return DataSource::hadcrut;
    if (has("GLB.Ts") || has("gistemp") || has("GISTEMP")) return DataSource::nasa;
    if (has("Land_and_Ocean") || has("berkeley") || has("Berkeley")) return DataSource::berkeley;
    if (has("noaa") || has("NOAA") || has("aravg")) return DataSource::noaa;
    return DataSource::normalized;
  }

  AnnualSeries load() const {
    if (!given()) throw DomainError("no dataset: pass --data or --url");
    DatasetDescriptor d;
    d.source = source();
    d.path_or_url = url.empty() ? path : url;
    d.year_from = from_year;
    d.year_to = to_year;
    d.label = label.empty() ? to_string(d.source) : label;
    return ingest(d);
  }

  ordered_json json() const {
    return ordered_json{{"data", url.empty() ? fs::path(path).filename().string() : url},
                        {"format", to_string(source())},
                        {"from_year", from_year},
                        {"to_year", to_year}};
  }
};

struct ModelOptions {
  std::string trend = "continuous";
  std::string errors = "piecewise-ar1";
  int ar_order = 1;
  std::string penalty = "bic";
  double penalty_weight = 0.0;
  int min_seg_len = 10;
  int max_m = 5;
  std::string search = "auto";

  void add(CLI::App* app) {
    app->add_option("--trend", trend, "continuous | discontinuous")->capture_default_str();
    app->add_option("--errors", errors, "independent | global-ar1 | global-ar<p> | piecewise-ar1")
        ->capture_default_str();
    app->add_option("--ar-order", ar_order, "order for --errors global-ar")->capture_default_str();
    app->add_option("--penalty", penalty, "bic | manual")->capture_default_str();
    app->add_option("--penalty-weight", penalty_weight, "manual penalty per free parameter")->capture_default_str();
    app->add_option("--min-seg-len", min_seg_len, "shortest admissible segment")->capture_default_str();
    app->add_option("--max-m", max_m, "largest changepoint count searched")->capture_default_str();
    app->add_option("--search", search, "auto | pelt | exact-dp | exhaustive")->capture_default_str();
  }

  ModelSpec spec() const {
    ModelSpec s;
    if (trend == "continuous") {
      s.trend = TrendKind::continuous;
    } else if (trend == "discontinuous") {
      s.trend = TrendKind::discontinuous;
    } else {
      throw DomainError("unknown --trend '" + trend + "'");
    }
    s.ar_order = ar_order;
    if (errors == "independent" || errors == "iid") {
      s.errors = ErrorKind::independent;
    } else if (errors == "piecewise-ar1" || errors == "piecewise") {
      s.errors = ErrorKind::piecewise_ar1;
    } else if (errors.starts_with("global-ar")) {
      s.errors = ErrorKind::global_ar;
      const std::string order = errors.substr(9);
      if (!order.empty()) {
        try {
          s.ar_order = std::stoi(order);
        } catch (const std::exception&) {
          throw DomainError("bad AR order in --errors '" + errors + "'");
        }
      }
    } else {
      throw DomainError("unknown --errors '" + errors + "'");
    }
    if (penalty == "bic") {
      s.penalty = PenaltyKind::bic;
    } else if (penalty == "manual") {
      s.penalty = PenaltyKind::manual;
      s.penalty_weight = penalty_weight;
    } else {
      throw DomainError("unknown --penalty '" + penalty + "'");
    }
    s.min_seg_len = min_seg_len;
    s.max_m = max_m;
    if (search == "auto") {
      s.search = default_search(s);
    } else if (search == "pelt") {
      s.search = SearchKind::pelt;
    } else if (search == "exact-dp" || search == "exact_dp") {
      s.search = SearchKind::exact_dp;
    } else if (search == "exhaustive") {
      s.search = SearchKind::exhaustive;
    } else {
      throw DomainError("unknown --search '" + search + "'");
    }
    s.validate();
    return s;
  }
};

fs::path out_path(const Common& c, const std::string& name) { return fs::path(c.out_dir) / name; }

ordered_json envelope(const std::string& command, ordered_json config) {
  ordered_json j;
  j["schema_version"] = report::kSchemaVersion;
  j["command"] = command;
  j["config"] = std::move(config);
  return j;
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// ---- fit -------------------------------------------------------------------

struct FitCommand {
  DataOptions data;
  ModelOptions model;
  int max_lag = 0;

  void add(CLI::App* app) {
    data.add(app);
    model.add(app);
    app->add_option("--max-lag", max_lag, "portmanteau lags (0: min(20, N/5))")->capture_default_str();
  }

  int run(const Common& c) const {
    const AnnualSeries s = data.load();
    const ModelSpec spec = model.spec();
    const Detection det = detect(s, spec);
    const FitResult& fit = det.fit;

    ordered_json config = data.json();
    config["model"] = report::spec_json(spec);
    config["max_lag"] = max_lag;
    ordered_json j = envelope("fit", config);
    j["series"] = report::series_json(s);
    j["fit"] = report::fit_json(fit, s);
    j["search"] = report::search_json(det.search.stats);

    std::optional<DiagnosticsReport> diag;
    try {
      diag = diagnose(fit, max_lag);
      j["diagnostics"] = report::diagnostics_json(*diag);
    } catch (const DomainError& e) {
      j["diagnostics"] = {{"skipped", e.what()}};
    }
    report::write_json(out_path(c, "fit.json"), j);

    std::ostringstream csv;
    csv << "year,anomaly,trend,segment\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
      const int t = static_cast<int>(i) + 1;
      csv << s.year_of(t) << ',' << csv_number(s.values()[i]) << ',' << csv_number(fit.fitted[i]) << ','
          << regime_index(t, fit.seg) << '\n';
    }
    report::write_text(out_path(c, "fit_trend.csv"), csv.str());

    plot::Chart chart;
    chart.title = s.label() + ": " + describe(spec);
    chart.x_label = "year";
    chart.y_label = "anomaly (deg C)";
    for (std::size_t i = 0; i < s.size(); ++i) {
      chart.points_x.push_back(s.start_year() + static_cast<double>(i));
      chart.points_y.push_back(s.values()[i]);
    }
    for (std::size_t k = 1; k <= fit.seg.segment_count(); ++k) {
      plot::Line line;
      line.color = "#c0392b";
      line.width = 2.5;
      for (int t = fit.seg.boundary(k - 1) + 1; t <= fit.seg.boundary(k); ++t) {
        line.x.push_back(s.year_of(t));
        line.y.push_back(fit.fitted[t - 1]);
      }
      chart.lines.push_back(line);
    }
    for (int t : fit.seg.taus()) chart.vlines.push_back(s.year_of(t) + 0.5);
    report::write_text(out_path(c, "fit.svg"), plot::line_chart(chart));

    std::cout << describe(spec) << " on " << s.label() << " " << s.start_year() << "-" << s.end_year() << "\n";
    std::cout << "changepoints:";
    if (fit.seg.m() == 0) std::cout << " none";
    for (int t : fit.seg.taus()) std::cout << ' ' << s.year_of(t);
    std::cout << "\n";
    for (std::size_t k = 1; k <= fit.seg.segment_count(); ++k) {
      std::printf("  %d-%d  slope %.4f deg C/yr\n", s.year_of(fit.seg.boundary(k - 1) + 1), s.year_of(fit.seg.boundary(k)),
                  fit.betas[k - 1]);
    }
    std::printf("objective %.4f  loglik %.4f  parameters %zu\n", fit.objective, fit.loglik, fit.parameter_count);
    std::cout.flush();
    if (diag && diag->rejected()) {
      std::fprintf(stderr,
                   "warning: residual diagnostics reject this model (Fisher-Gallagher p=%.3g, Shapiro-Wilk p=%.3g)\n",
                   diag->whiteness.p_value, diag->normality.p_value);
    }
    return 0;
  }
};

// ---- diagnose --------------------------------------------------------------

struct DiagnoseCommand {
  DataOptions data;
  ModelOptions model;
  int max_lag = 0;

  void add(CLI::App* app) {
    data.add(app);
    model.add(app);
    app->add_option("--max-lag", max_lag, "portmanteau lags (0: min(20, N/5))")->capture_default_str();
  }

  int run(const Common& c) const {
    const AnnualSeries s = data.load();
    const ModelSpec spec = model.spec();
    const Detection det = detect(s, spec);
    const DiagnosticsReport d = diagnose(det.fit, max_lag);
    ordered_json config = data.json();
    config["model"] = report::spec_json(spec);
    config["max_lag"] = max_lag;
    ordered_json j = envelope("diagnose", config);
    j["series"] = report::series_json(s);
    j["fit"] = report::fit_json(det.fit, s);
    j["diagnostics"] = report::diagnostics_json(d);
    report::write_json(out_path(c, "diagnostics.json"), j);

    std::printf("%-22s %12s %10s  %s\n", "test", "statistic", "p-value", "verdict");
    std::printf("%-22s %12.4f %10.3g  %s\n", ("Fisher-Gallagher(" + std::to_string(d.whiteness.max_lag) + ")").c_str(),
                d.whiteness.statistic, d.whiteness.p_value, d.whiteness_rejected ? "reject" : "pass");
    std::printf("%-22s %12.4f %10.3g  %s\n", "Shapiro-Wilk", d.normality.w, d.normality.p_value,
                d.normality_rejected ? "reject" : "pass");
    std::printf("acf band +-%.3f:", d.acf_band);
    for (double r : d.acf) std::printf(" %.2f", r);
    std::printf("\n");
    return 0;
  }
};

// ---- surge-test ------------------------------------------------------------

NullParams fitted_null(const AnnualSeries& s) {
  ModelSpec spec;
  spec.trend = TrendKind::continuous;
  spec.errors = ErrorKind::global_ar;
  spec.ar_order = 1;
  const FitResult fit = fit_at(s, Segmentation(s.size(), {}), spec);
  return NullParams{fit.alphas[0], fit.betas[0], fit.phis[0][0], fit.sigmas[0], static_cast<int>(s.size())};
}

struct SurgeTestCommand {
  DataOptions data;
  double level = 0.05;
  int reps = 100000;
  int fixed_k = 0;
  std::string null = "fitted";

  void add(CLI::App* app) {
    data.add(app, 1970);
    app->add_option("--level", level, "two-sided test level")->capture_default_str();
    app->add_option("--reps", reps, "Monte Carlo replicates")->capture_default_str();
    app->add_option("--fixed-k", fixed_k, "also run the fixed-k test with the break after this year");
    app->add_option("--null", null, "fitted | hadcrut | nasa | noaa | berkeley")->capture_default_str();
  }

  int run(const Common& c) const {
    const AnnualSeries s = data.load();
    const int n = static_cast<int>(s.size());
    NullParams np = null == "fitted" ? fitted_null(s) : null_preset(null, n);
    np.n = n;
    const TMax tm = t_max(s.values());
    const QuantileEstimate q = mc_null_quantile(np, reps, 1.0 - level, c.seed, c.threads);
    const bool detected = tm.t > q.q;

    ordered_json config = data.json();
    config["level"] = level;
    config["reps"] = reps;
    config["seed"] = c.seed;
    config["null"] = null;
    if (fixed_k) config["fixed_k"] = fixed_k;
    ordered_json j = envelope("surge-test", config);
    j["series"] = report::series_json(s);
    j["null"] = report::null_json(np);
    const auto range = admissible_range(n);
    j["admissible"] = {{"from_year", s.year_of(range.lo)}, {"to_year", s.year_of(range.hi)}};
    j["t_max"] = {{"statistic", tm.t}, {"signed", tm.signed_t}, {"year", s.year_of(tm.k)}, {"k", tm.k}};
    j["threshold"] = report::quantile_json(q);
    j["surge_detected"] = detected;
    std::printf("T_max = %.4f at %d (k = %d)\n", tm.t, s.year_of(tm.k), tm.k);
    std::printf("Q_%d = %.4f (Monte Carlo s.e. %.4f, %d replicates)\n", n, q.q, q.mc_se, q.reps);
    std::printf("%s\n", detected ? "surge detected" : "no detectable surge");

    if (fixed_k) {
      const int k = s.index_of(fixed_k);
      const double tk = t_statistic(s.values(), k);
      const double crit = fixed_k_critical_value(n, level);
      const bool reject = std::abs(tk) > crit;
      j["fixed_k"] = {{"year", fixed_k},
                      {"k", k},
                      {"statistic", tk},
                      {"critical_value", crit},
                      {"rejected", reject},
                      {"rejected_against_t_max_threshold", std::abs(tk) > q.q}};
      std::printf("fixed-k %d: |T_k| = %.4f vs t critical %.3f: %s\n", fixed_k, std::abs(tk), crit,
                  reject ? "reject" : "no rejection");
    }
    report::write_json(out_path(c, "surge_test.json"), j);
    return 0;
  }
};

// ---- power-grid ------------------------------------------------------------

struct PowerGridCommand {
  DataOptions data;
  std::string null = "hadcrut";
  int start_year = 1970;
  int surge_from = 1990, surge_to = 2015;
  int vantage_from = 2024, vantage_to = 2040;
  int reps = 100000;
  double level = 0.05;
  std::optional<double> baseline_slope;

  void add(CLI::App* app) {
    data.add(app, 1970);
    app->add_option("--null", null, "hadcrut | nasa | noaa | berkeley | fitted")->capture_default_str();
    app->add_option("--start-year", start_year, "first year of every simulated series")->capture_default_str();
    app->add_option("--surge-from", surge_from)->capture_default_str();
    app->add_option("--surge-to", surge_to)->capture_default_str();
    app->add_option("--vantage-from", vantage_from)->capture_default_str();
    app->add_option("--vantage-to", vantage_to)->capture_default_str();
    app->add_option("--reps", reps, "Monte Carlo replicates per vantage year")->capture_default_str();
    app->add_option("--level", level, "two-sided test level")->capture_default_str();
    app->add_option("--baseline-slope", baseline_slope,
                    "pre-surge slope for every row (default: estimated from --data, else the null slope)");
  }

  int run(const Common& c) const {
    std::vector<int> surges, vantages;
    for (int y = surge_from; y <= surge_to; ++y) surges.push_back(y);
    for (int y = vantage_from; y <= vantage_to; ++y) vantages.push_back(y);
    if (surges.empty() || vantages.empty()) throw DomainError("empty surge or vantage range");

    std::optional<AnnualSeries> s;
    if (data.given()) s = data.load();
    if (s && s->start_year() != start_year) throw DomainError("--from-year must equal --start-year");
    NullParams np;
    if (null == "fitted") {
      if (!s) throw DomainError("--null fitted needs --data");
      np = fitted_null(*s);
    } else {
      np = null_preset(null, vantage_to - start_year + 1);
    }
    std::vector<double> base;
    std::string base_source;
    if (baseline_slope) {
      base.assign(surges.size(), *baseline_slope);
      base_source = "fixed";
    } else if (s) {
      base = baseline_slopes(*s, surges);
      base_source = "data";
    } else {
      base.assign(surges.size(), np.beta1);
      base_source = "null";
    }
    const SurgeGrid g = surge_grid(np, base, start_year, surges, vantages, reps, c.seed, c.threads, 1.0 - level);

    ordered_json config;
    if (data.given()) config = data.json();
    config["null"] = null;
    config["start_year"] = start_year;
    config["surge_years"] = {surge_from, surge_to};
    config["vantage_years"] = {vantage_from, vantage_to};
    config["reps"] = reps;
    config["level"] = level;
    config["seed"] = c.seed;
    config["baseline_source"] = base_source;
    ordered_json j = envelope("power-grid", config);
    j["null"] = report::null_json(np);
    j["grid"] = report::grid_json(g);
    report::write_json(out_path(c, "power_grid.json"), j);

    std::ostringstream csv;
    csv << "surge_year";
    for (int v : vantages) csv << ',' << v;
    csv << '\n';
    for (std::size_t i = 0; i < surges.size(); ++i) {
      csv << surges[i];
      for (std::size_t k = 0; k < vantages.size(); ++k) csv << ',' << csv_number(g.min_pct[i][k]);
      csv << '\n';
    }
    report::write_text(out_path(c, "power_grid.csv"), csv.str());
    std::ostringstream slopes;
    slopes << "surge_year";
    for (int v : vantages) slopes << ',' << v;
    slopes << '\n';
    for (std::size_t i = 0; i < surges.size(); ++i) {
      slopes << surges[i];
      for (std::size_t k = 0; k < vantages.size(); ++k) slopes << ',' << csv_number(g.min_slope[i][k]);
      slopes << '\n';
    }
    report::write_text(out_path(c, "power_grid_slopes.csv"), slopes.str());

    plot::Heatmap map;
    map.title = "Minimum detectable surge (% increase, deg C/yr), " + std::to_string(static_cast<int>(std::lround(level * 100))) +
                "% level";
    map.rows = surges;
    map.cols = vantages;
    map.value = g.min_pct;
    map.detail = g.min_slope;
    map.row_label = "surge start year";
    map.col_label = "vantage year";
    report::write_text(out_path(c, "power_grid.svg"), plot::heatmap(map));

    std::printf("%-6s", "surge");
    for (int v : vantages) std::printf(" %6d", v);
    std::printf("\n");
    for (std::size_t i = 0; i < surges.size(); ++i) {
      std::printf("%-6d", surges[i]);
      for (std::size_t k = 0; k < vantages.size(); ++k) std::printf(" %5.0f%%", g.min_pct[i][k]);
      std::printf("\n");
    }
    return 0;
  }
};

// ---- simulate --------------------------------------------------------------

struct SimulateCommand {
  std::string preset;
  double phi = 0.0, sigma = 1.0, alpha = 0.0, beta = 0.0;
  int n = 0;
  int reps = 1;
  std::string stat = "series";
  std::optional<double> quantile;
  int max_lag = 10;

  void add(CLI::App* app) {
    app->add_option("--preset", preset, "hadcrut-null | nasa-null | noaa-null | berkeley-null");
    app->add_option("--phi", phi)->capture_default_str();
    app->add_option("--sigma", sigma)->capture_default_str();
    app->add_option("--alpha", alpha, "trend intercept")->capture_default_str();
    app->add_option("--beta", beta, "trend slope per year")->capture_default_str();
    app->add_option("--n", n, "series length (default 54 with a preset, else 100)");
    app->add_option("--reps", reps, "replicates")->capture_default_str();
    app->add_option("--stat", stat, "series | tmax | acf")->capture_default_str();
    app->add_option("--quantile", quantile, "report this quantile of the statistic");
    app->add_option("--max-lag", max_lag, "lags for --stat acf")->capture_default_str();
  }

  int run(const Common& c, const CLI::App* app) const {
    NullParams p{alpha, beta, phi, sigma, n > 0 ? n : 100};
    if (!preset.empty()) {
      p = null_preset(preset, n > 0 ? n : 54);
      // explicit flags override the preset
      if (app->count("--phi")) p.phi = phi;
      if (app->count("--sigma")) p.sigma = sigma;
      if (app->count("--alpha")) p.alpha1 = alpha;
      if (app->count("--beta")) p.beta1 = beta;
    }
    if (!(std::abs(p.phi) < 1.0)) throw DomainError("|phi| must be below 1");
    if (!(p.sigma > 0.0)) throw DomainError("sigma must be positive");
    if (p.n < 1) throw DomainError("n must be positive");
    if (reps < 1) throw DomainError("reps must be positive");

    ordered_json config{{"preset", preset}, {"n", p.n},         {"phi", p.phi},   {"sigma", p.sigma},
                        {"alpha", p.alpha1}, {"beta", p.beta1}, {"reps", reps},   {"stat", stat},
                        {"seed", c.seed}};
    if (quantile) config["quantile"] = *quantile;
    ordered_json j = envelope("simulate", config);

    auto series = [&](std::size_t r) {
      RandomStream rng(c.seed, r);
      std::vector<double> x(static_cast<std::size_t>(p.n));
      simulate_ar1_into(p.phi, p.sigma, x, rng);
      for (int t = 1; t <= p.n; ++t) x[t - 1] += p.alpha1 + p.beta1 * t;
      return x;
    };

    if (stat == "series") {
      std::ostringstream csv;
      csv << "replicate,t,value\n";
      for (int r = 0; r < reps; ++r) {
        const auto x = series(static_cast<std::size_t>(r));
        for (int t = 1; t <= p.n; ++t) csv << r << ',' << t << ',' << csv_number(x[t - 1]) << '\n';
      }
      report::write_text(out_path(c, "simulate.csv"), csv.str());
      std::printf("wrote %d series of length %d\n", reps, p.n);
    } else if (stat == "tmax") {
      p.validate();
      const auto values = simulate_tmax(p, reps, c.seed, c.threads);
      std::ostringstream csv;
      csv << "replicate,t_max\n";
      for (int r = 0; r < reps; ++r) csv << r << ',' << csv_number(values[r]) << '\n';
      report::write_text(out_path(c, "simulate.csv"), csv.str());
      if (quantile) {
        const auto q = sample_quantile(values, *quantile);
        j["quantile"] = report::quantile_json(q);
        std::printf("T_max %.3g quantile over %d replicates: %.4f (s.e. %.4f)\n", *quantile, reps, q.q, q.mc_se);
      }
    } else if (stat == "acf") {
      if (max_lag < 1 || max_lag >= p.n) throw DomainError("--max-lag must lie in 1..n-1");
      std::vector<double> mean(static_cast<std::size_t>(max_lag), 0.0);
      for (int r = 0; r < reps; ++r) {
        const auto acf = sample_acf(series(static_cast<std::size_t>(r)), max_lag);
        for (int k = 0; k < max_lag; ++k) mean[k] += acf[k] / reps;
      }
      j["mean_acf"] = mean;
      j["acf_band"] = 2.0 / std::sqrt(static_cast<double>(p.n));
      std::printf("mean acf (band +-%.3f):", 2.0 / std::sqrt(static_cast<double>(p.n)));
      for (double v : mean) std::printf(" %.3f", v);
      std::printf("\n");
    } else {
      throw DomainError("unknown --stat '" + stat + "'");
    }
    report::write_json(out_path(c, "simulate.json"), j);
    return 0;
  }
};

// ---- ingest ----------------------------------------------------------------

struct IngestCommand {
  DataOptions data;
  std::string out;

  void add(CLI::App* app) {
    data.add(app);
    app->add_option("--out", out, "normalized CSV path (default <out-dir>/<label>.csv)");
  }

  int run(const Common& c) const {
    const AnnualSeries s = data.load();
    const fs::path path = out.empty() ? out_path(c, s.label() + ".csv") : fs::path(out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    export_normalized(s, path);
    std::printf("%s: %d-%d (N=%zu), baseline %s -> %s\n", s.label().c_str(), s.start_year(), s.end_year(), s.size(),
                s.baseline().empty() ? "unknown" : s.baseline().c_str(), path.string().c_str());
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trend changepoints and warming-surge tests for annual temperature series"};
  app.set_config("--config", "", "INI/TOML file with defaults; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Common common;
  app.add_option("--out-dir", common.out_dir, "directory for reports")->capture_default_str();
  app.add_option("--seed", common.seed, "master random seed")->capture_default_str();
  app.add_option("--threads", common.threads, "worker threads (0: all cores)")->capture_default_str();

  FitCommand fit;
  DiagnoseCommand diag;
  SurgeTestCommand surge;
  PowerGridCommand grid;
  SimulateCommand sim;
  IngestCommand ing;
  auto* fit_app = app.add_subcommand("fit", "detect changepoints and fit the piecewise trend");
  fit.add(fit_app);
  auto* diag_app = app.add_subcommand("diagnose", "residual whiteness and normality tests of a fit");
  diag.add(diag_app);
  auto* surge_app = app.add_subcommand("surge-test", "difference-of-slopes surge test with Monte Carlo threshold");
  surge.add(surge_app);
  auto* grid_app = app.add_subcommand("power-grid", "minimum detectable surge over surge and vantage years");
  grid.add(grid_app);
  auto* sim_app = app.add_subcommand("simulate", "simulate AR(1) series or T_max statistics");
  sim.add(sim_app);
  auto* ing_app = app.add_subcommand("ingest", "convert an agency file to the normalized CSV");
  ing.add(ing_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    set_default_threads(common.threads);
    fs::create_directories(common.out_dir);
    if (fit_app->parsed()) return fit.run(common);
    if (diag_app->parsed()) return diag.run(common);
    if (surge_app->parsed()) return surge.run(common);
    if (grid_app->parsed()) return grid.run(common);
    if (sim_app->parsed()) return sim.run(common, sim_app);
    if (ing_app->parsed()) return ing.run(common);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DegenerateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
