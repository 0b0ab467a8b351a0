#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "trendshift/data_io.hpp"
#include "trendshift/surge_test.hpp"
#include "trendshift/trend_fit.hpp"

using namespace trendshift;

namespace {

AnnualSeries hadcrut_1970() {
  DatasetDescriptor d;
  d.source = DataSource::hadcrut;
  d.path_or_url = testing::hadcrut_path().string();
  d.year_from = 1970;
  return ingest(d);
}

}  // namespace

TEST_CASE("null presets") {
  const auto h = null_preset("hadcrut-null", 54);
  CHECK(h.phi == 0.087);
  CHECK(h.sigma == 0.097);
  CHECK(h.beta1 == 0.020);
  CHECK(h.alpha1 == -0.170);
  CHECK(h.n == 54);
  CHECK(null_preset("Hadley", 54).phi == 0.087);
  CHECK(null_preset("NASA", 54).phi == 0.149);
  CHECK(null_preset("noaa", 54).phi == 0.190);
  CHECK(null_preset("berkeley", 54).phi == 0.102);
  CHECK_THROWS_AS(null_preset("cru", 54), DomainError);
  CHECK(null_preset_names().size() == 4);
  NullParams bad = h;
  bad.phi = 1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = h;
  bad.n = 9;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("admissible range trims ten percent at each end") {
  CHECK(admissible_range(54).lo == 6);
  CHECK(admissible_range(54).hi == 48);
  CHECK(admissible_range(50).lo == 5);
  CHECK(admissible_range(50).hi == 45);
  CHECK(admissible_range(71).lo == 8);
  CHECK(admissible_range(71).hi == 63);
}

TEST_CASE("equal slopes without noise give T_k = 0") {
  std::vector<double> y(40);
  for (int t = 1; t <= 40; ++t) y[t - 1] = -0.1 + 0.02 * t;
  CHECK(t_statistic(y, 20) == 0.0);
  const auto tm = t_max(y);
  CHECK(tm.t == 0.0);
  CHECK(tm.k == admissible_range(40).lo);
}

TEST_CASE("t_statistic outside the admissible range is a domain error") {
  std::mt19937_64 rng(1);
  const auto y = testing::normals(rng, 54);
  CHECK_THROWS_AS(t_statistic(y, 5), DomainError);
  CHECK_THROWS_AS(t_statistic(y, 49), DomainError);
  CHECK_NOTHROW(t_statistic(y, 6));
  CHECK_THROWS_AS(t_max(std::vector<double>(19, 1.0)), DomainError);
}

TEST_CASE("T_k on HadCRUT 1970-2022 agrees with the joint-likelihood oracle") {
  const auto s = hadcrut_1970();
  REQUIRE(s.size() == 53);
  // tests/oracles/joint_mle.py (profile likelihood): T = 0.6368557445 for the break after 2012
  CHECK(std::abs(t_statistic(s.values(), s.index_of(2012)) - 0.6368557445) < 5e-8);
}

TEST_CASE("T_k is the slope difference over the dense-GLS standard deviation") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto e = testing::ar1_path(rng, 50, 0.3, 0.1);
    std::vector<double> y(50);
    for (int t = 1; t <= 50; ++t) y[t - 1] = 0.02 * t + e[t - 1];
    const int k = std::uniform_int_distribution<int>(5, 45)(rng);
    const auto f = fit_single_break(y, k);
    const double sd = std::sqrt(testing::dense_slope_diff_variance(50, k, f.phi, f.sigma));
    CHECK(t_statistic(y, k) == doctest::Approx((f.beta2 - f.beta1) / sd).epsilon(1e-9));
  }
}

TEST_CASE("fixed-k critical value for N = 54 is 2.007") {
  CHECK(std::abs(fixed_k_critical_value(54, 0.05) - 2.007) < 0.001);
  CHECK_THROWS_AS(fixed_k_critical_value(54, 1.5), DomainError);
}

TEST_CASE("a large mid-series slope change is located within two years") {
  int within = 0;
  for (int seed = 0; seed < 100; ++seed) {
    RandomStream rng(300, static_cast<std::uint64_t>(seed));
    std::vector<double> y(60);
    simulate_ar1_into(0.1, 0.05, y, rng);
    for (int t = 1; t <= 60; ++t) y[t - 1] += 0.01 * t + 0.05 * std::max(t - 30, 0);
    within += std::abs(t_max(y).k - 30) <= 2;
  }
  CHECK(within == 100);
}

TEST_CASE("type-7 quantiles by hand") {
  const std::vector<double> x{5, 1, 4, 2, 3};
  CHECK(sample_quantile(x, 0.5).q == doctest::Approx(3.0));
  CHECK(sample_quantile(x, 0.9).q == doctest::Approx(4.6));
  CHECK(sample_quantile(x, 0.1).q == doctest::Approx(1.4));
  CHECK_THROWS_AS(sample_quantile({}, 0.5), DomainError);
  CHECK_THROWS_AS(sample_quantile(x, 1.0), DomainError);
}

TEST_CASE("Monte Carlo quantile: validation, determinism and thread invariance") {
  const auto null = null_preset("hadcrut", 54);
  CHECK_THROWS_AS(mc_null_quantile(null, 999, 0.95, 1), DomainError);
  CHECK_THROWS_AS(mc_null_quantile(null, 1000, 0.0, 1), DomainError);
  const auto a = mc_null_quantile(null, 2000, 0.95, 7, 1);
  const auto b = mc_null_quantile(null, 2000, 0.95, 7, 4);
  CHECK(a.q == b.q);
  CHECK(a.mc_se == b.mc_se);
  CHECK(a.mc_se > 0.0);
  CHECK(a.reps == 2000);
  const auto c = mc_null_quantile(null, 2000, 0.95, 8, 1);
  CHECK(a.q != c.q);
}

TEST_CASE("multiplicity inflates the threshold above the fixed-k t quantile") {
  for (int n : {30, 54}) {
    auto white = NullParams{0.0, 0.0, 0.0, 1.0, n};
    const auto q = mc_null_quantile(white, 2000, 0.95, 11);
    CHECK(q.q > fixed_k_critical_value(n, 0.05));
    CHECK(q.q > 2.007);
  }
}

TEST_CASE("the threshold does not grow with series length") {
  const auto q54 = mc_null_quantile(null_preset("hadcrut", 54), 4000, 0.95, 5);
  const auto q71 = mc_null_quantile(null_preset("hadcrut", 71), 4000, 0.95, 5);
  CHECK(q54.q > q71.q - 2.0 * std::hypot(q54.mc_se, q71.mc_se));
}

TEST_CASE("minimum detectable slope inverts the statistic") {
  const auto null = null_preset("hadcrut", 54);
  const auto zero = min_detectable_slope(null, 0.0187, 43, 54, 0.0);
  CHECK(zero.slope == 0.0187);
  CHECK(zero.pct == 0.0);
  const auto m = min_detectable_slope(null, 0.0187, 43, 54, 3.1082);
  CHECK(m.sd == doctest::Approx(std::sqrt(4.467917270984471e-05)).epsilon(1e-10));
  CHECK((m.slope - 0.0187) / m.sd == doctest::Approx(3.1082).epsilon(1e-14));
  CHECK(m.pct == doctest::Approx(100 * (m.slope - 0.0187) / 0.0187).epsilon(1e-14));
  CHECK_THROWS_AS(min_detectable_slope(null, 0.0187, 52, 54, 3.0), DomainError);
}

TEST_CASE("a single-cell grid equals min_detectable_slope") {
  const auto null = null_preset("hadcrut", 54);
  const std::vector<double> base{0.0187};
  const std::vector<int> surge{2012}, vantage{2023};
  const auto g = surge_grid(null, base, 1970, surge, vantage, 1000, 3);
  auto p = null;
  p.n = 54;
  const auto q = mc_null_quantile(p, 1000, 0.95, 3);
  CHECK(g.quantiles[0].q == q.q);
  const auto m = min_detectable_slope(null, 0.0187, 43, 54, q.q);
  CHECK(g.min_slope[0][0] == m.slope);
  CHECK(g.min_pct[0][0] == m.pct);
}

TEST_CASE("grid rows are positive and nonincreasing in the vantage year") {
  const auto null = null_preset("hadcrut", 54);
  const std::vector<int> surge{1990, 2000, 2010};
  const std::vector<int> vantage{2024, 2028, 2032, 2036, 2040};
  const std::vector<double> base{0.018, 0.019, 0.019};
  const auto g = surge_grid(null, base, 1970, surge, vantage, 2000, 9);
  for (const auto& row : g.min_pct) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      CHECK(row[j] > 0.0);
      if (j) CHECK(row[j] <= row[j - 1]);
    }
  }
  CHECK_THROWS_AS(surge_grid(null, base, 1970, surge, std::vector<int>{2012}, 1000, 1), DomainError);
}

TEST_CASE("an injected 150% surge is detected in most seeds") {
  const auto null = null_preset("hadcrut", 54);
  const auto q = mc_null_quantile(null, 2000, 0.95, 12);
  int detected = 0;
  for (int seed = 0; seed < 50; ++seed) {
    RandomStream rng(77, static_cast<std::uint64_t>(seed));
    std::vector<double> y(54);
    simulate_ar1_into(null.phi, null.sigma, y, rng);
    const int k = 2005 - 1970 + 1;
    for (int t = 1; t <= 54; ++t) y[t - 1] += null.alpha1 + null.beta1 * t + 1.5 * null.beta1 * std::max(t - k, 0);
    detected += t_max(y).t > q.q;
  }
  CHECK(detected >= 35);
}

TEST_CASE("baseline slopes come from single-break fits") {
  const auto s = hadcrut_1970();
  const std::vector<int> years{2012};
  CHECK(baseline_slopes(s, years)[0] == doctest::Approx(0.0188938996).epsilon(1e-7));
}
