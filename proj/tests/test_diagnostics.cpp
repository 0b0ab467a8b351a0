#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "support.hpp"
#include "trendshift/data_io.hpp"
#include "trendshift/diagnostics.hpp"
#include "trendshift/segmentation.hpp"

using namespace trendshift;

namespace {

std::vector<double> reference_sequence() {
  std::vector<double> x;
  for (int t = 1; t <= 60; ++t) x.push_back(std::sin(1.0 * t * t) + 0.5 * std::sin(3.0 * t));
  return x;
}

}  // namespace

TEST_CASE("Shapiro-Wilk matches scipy reference values") {
  struct Case {
    std::vector<double> x;
    double w, p;
  };
  // scipy.stats.shapiro, see tests/oracles/diagnostics_ref.py
  const Case cases[] = {
      {{1, 2, 4}, 0.9642857143, 0.6368868450},
      {{1, 2, 3, 5}, 0.9713736655, 0.8499708190},
      {{2.1, 3.3, 1.2, 5.5, 4.1}, 0.9865689772, 0.9663568438},
      {{1, 2, 3, 4, 5, 6, 7, 8, 20, 9, 11}, 0.8766596628, 0.0943429884},
      {{148, 154, 158, 160, 161, 162, 166, 170, 182, 195, 236, 157, 163, 169}, 0.7470137691, 1.1862380512e-03},
  };
  for (const auto& c : cases) {
    const auto r = shapiro_wilk(c.x);
    CHECK(r.w == doctest::Approx(c.w).epsilon(1e-8));
    CHECK(r.p_value == doctest::Approx(c.p).epsilon(1e-6));
  }
}

TEST_CASE("Shapiro-Wilk input validation") {
  CHECK_THROWS_AS(shapiro_wilk(std::vector<double>{1, 2}), DomainError);
  CHECK_THROWS_AS(shapiro_wilk(std::vector<double>(10, 3.0)), DomainError);
  CHECK_THROWS_AS(shapiro_wilk(std::vector<double>(5001, 1.0)), DomainError);
}

TEST_CASE("Shapiro-Wilk on normal quantiles is near 1") {
  const boost::math::normal z;
  std::vector<double> x;
  for (int i = 1; i <= 100; ++i) x.push_back(boost::math::quantile(z, (i - 0.375) / 100.25));
  const auto r = shapiro_wilk(x);
  CHECK(r.w > 0.995);
  CHECK(r.p_value > 0.9);
}

TEST_CASE("Shapiro-Wilk W is affine invariant") {
  std::mt19937_64 rng(2);
  const auto x = testing::normals(rng, 40);
  std::vector<double> y;
  for (double v : x) y.push_back(-3.5 * v + 100.0);
  CHECK(shapiro_wilk(x).w == doctest::Approx(shapiro_wilk(y).w).epsilon(1e-12));
}

TEST_CASE("Shapiro-Wilk has power against heavy tails") {
  std::mt19937_64 rng(4);
  std::student_t_distribution<double> t2(2.0);
  int rejected = 0;
  const int reps = 500;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<double> x(100);
    for (double& v : x) v = t2(rng);
    rejected += shapiro_wilk(x).p_value < 0.05;
  }
  CHECK(rejected >= 0.9 * reps);
}

TEST_CASE("weighted portmanteau statistic and gamma p-value match reference values") {
  // tests/oracles/diagnostics_ref.py
  const auto x = reference_sequence();
  const auto r0 = fisher_gallagher_test(x, 10, 0);
  CHECK(r0.statistic == doctest::Approx(19.577887693792).epsilon(1e-11));
  CHECK(r0.p_value == doctest::Approx(4.323268819481e-04).epsilon(1e-9));
  const auto r1 = fisher_gallagher_test(x, 10, 1);
  CHECK(r1.statistic == r0.statistic);
  CHECK(r1.p_value == doctest::Approx(7.055611091859e-05).epsilon(1e-9));
  // gamma moments: mean (L+1-2p)/2, variance (2L^2+3L+1-6Lp)/(3L)
  CHECK(r0.shape * r0.scale == doctest::Approx(5.5));
  CHECK(r0.shape * r0.scale * r0.scale == doctest::Approx(231.0 / 30.0));
}

TEST_CASE("portmanteau statistic is scale invariant") {
  const auto x = reference_sequence();
  std::vector<double> y;
  for (double v : x) y.push_back(1e3 * v - 7.0);
  CHECK(fisher_gallagher_test(y, 12, 1).statistic ==
        doctest::Approx(fisher_gallagher_test(x, 12, 1).statistic).epsilon(1e-12));
}

TEST_CASE("portmanteau input validation") {
  const auto x = reference_sequence();
  CHECK_THROWS_AS(fisher_gallagher_test(x, 30, 0), DomainError);
  CHECK_THROWS_AS(fisher_gallagher_test(x, 0, 0), DomainError);
  CHECK_THROWS_AS(fisher_gallagher_test(x, 2, 2), DomainError);
  CHECK_THROWS_AS(fisher_gallagher_test(std::vector<double>(40, 1.0), 5, 0), DomainError);
}

TEST_CASE("portmanteau p-values are close to uniform under white noise") {
  std::vector<double> p;
  for (int rep = 0; rep < 2000; ++rep) {
    RandomStream rng(44, static_cast<std::uint64_t>(rep));
    std::vector<double> x(174);
    simulate_ar1_into(0.0, 1.0, x, rng);
    p.push_back(fisher_gallagher_test(x, 20, 0).p_value);
  }
  std::sort(p.begin(), p.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    ks = std::max({ks, std::abs(p[i] - static_cast<double>(i) / p.size()),
                   std::abs(p[i] - static_cast<double>(i + 1) / p.size())});
  }
  CHECK(ks < 0.05);  // the 10^4-replicate version with KS < 0.03 is an acceptance check
}

TEST_CASE("default lag count") {
  CHECK(default_max_lag(174) == 20);
  CHECK(default_max_lag(54) == 10);
  CHECK(default_max_lag(30) == 6);
}

TEST_CASE("diagnose flags independent-errors fits on HadCRUT and passes AR fits") {
  DatasetDescriptor d;
  d.source = DataSource::hadcrut;
  d.path_or_url = testing::hadcrut_path().string();
  const auto s = ingest(d);
  ModelSpec spec;
  spec.trend = TrendKind::discontinuous;
  spec.min_seg_len = 10;
  spec.errors = ErrorKind::independent;
  const auto iid = diagnose(detect(s, spec).fit);
  CHECK(iid.whiteness.max_lag == 20);
  CHECK(iid.whiteness_rejected);
  CHECK(iid.rejected());
  CHECK(iid.acf.size() == 20);
  CHECK(iid.acf_band == doctest::Approx(2.0 / std::sqrt(173.0)));

  spec.errors = ErrorKind::global_ar;
  const auto ar = diagnose(detect(s, spec).fit);
  CHECK(ar.whiteness.fitted_order == 1);
  CHECK_FALSE(ar.whiteness_rejected);
}

TEST_CASE("diagnostics pass on most correctly specified simulated fits") {
  ModelSpec spec;
  spec.errors = ErrorKind::global_ar;
  spec.min_seg_len = 5;
  int pass = 0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    RandomStream rng(45, static_cast<std::uint64_t>(rep));
    std::vector<double> y(54);
    simulate_ar1_into(0.087, 0.097, y, rng);
    for (int t = 1; t <= 54; ++t) y[t - 1] += -0.17 + 0.02 * t;
    const auto fit = fit_at(y, Segmentation(54, {}), spec);
    pass += !diagnose(fit).rejected();
  }
  // two tests at 5% each: roughly 90% pass jointly
  CHECK(pass >= 0.85 * reps);
}
