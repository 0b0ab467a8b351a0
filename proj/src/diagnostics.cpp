#include "trendshift/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "trendshift/ar_errors.hpp"

namespace trendshift {

namespace {

// cc[0] + cc[1] x + ... (Horner)
template <std::size_t N>
double poly(const double (&cc)[N], double x) {
  double r = 0.0;
  for (std::size_t i = N; i-- > 0;) r = r * x + cc[i];
  return r;
}

// Half of the Shapiro-Wilk coefficient vector, largest first (a_1 >= a_2 ...).
std::vector<double> sw_coefficients(int n) {
  static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  const int half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::sqrt(0.5);
    return a;
  }
  const boost::math::normal stdnorm;
  std::vector<double> m(half);
  double summ2 = 0.0;
  for (int i = 0; i < half; ++i) {
    m[i] = boost::math::quantile(stdnorm, (i + 1 - 0.375) / (n + 0.25));
    summ2 += m[i] * m[i];
  }
  summ2 *= 2.0;
  const double ssumm2 = std::sqrt(summ2);
  const double rsn = 1.0 / std::sqrt(static_cast<double>(n));
  const double a1 = poly(c1, rsn) - m[0] / ssumm2;
  int first = 1;
  double fac;
  if (n > 5) {
    const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
    a[1] = a2;
    first = 2;
  } else {
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
  }
  a[0] = a1;
  for (int i = first; i < half; ++i) a[i] = -m[i] / fac;
  return a;
}

}  // namespace

PortmanteauResult fisher_gallagher_test(std::span<const double> residuals, int max_lag, int fitted_order) {
  const int n = static_cast<int>(residuals.size());
  if (max_lag < 1) throw DomainError("max_lag must be positive");
  if (2 * max_lag >= n) throw DomainError("series too short: need max_lag < N/2");
  if (fitted_order < 0) throw DomainError("fitted order must be nonnegative");
  const double lag = max_lag;
  const double p = fitted_order;
  const double mean = (lag + 1.0 - 2.0 * p) / 2.0;
  const double var = (2.0 * lag * lag + 3.0 * lag + 1.0 - 6.0 * lag * p) / (3.0 * lag);
  if (!(mean > 0.0) || !(var > 0.0)) throw DomainError("max_lag too small for the fitted order");

  const auto r = sample_acf(residuals, max_lag);
  double stat = 0.0;
  for (int k = 1; k <= max_lag; ++k) {
    const double weight = (lag - k + 1.0) / lag;
    stat += weight * r[k - 1] * r[k - 1] / (n - k);
  }
  stat *= static_cast<double>(n) * (n + 2.0);

  PortmanteauResult out;
  out.statistic = stat;
  out.max_lag = max_lag;
  out.fitted_order = fitted_order;
  out.shape = mean * mean / var;
  out.scale = var / mean;
  const boost::math::gamma_distribution<double> null(out.shape, out.scale);
  out.p_value = boost::math::cdf(boost::math::complement(null, stat));
  return out;
}

NormalityResult shapiro_wilk(std::span<const double> sample) {
  const int n = static_cast<int>(sample.size());
  if (n < 3 || n > 5000) throw DomainError("Shapiro-Wilk needs 3 <= n <= 5000");
  std::vector<double> x(sample.begin(), sample.end());
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("Shapiro-Wilk sample has non-finite values");
  }
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (!(range > 1e-19 * std::max(1.0, std::abs(x.front())))) throw DomainError("constant sample");

  // Full antisymmetric coefficient vector against the ascending sample.
  const auto half = sw_coefficients(n);
  std::vector<double> a(n, 0.0);
  for (int i = 0; i < n / 2; ++i) {
    a[i] = -half[i];
    a[n - 1 - i] = half[i];
  }
  double sa = 0.0, sx = 0.0;
  for (int i = 0; i < n; ++i) {
    sa += a[i];
    sx += x[i] / range;
  }
  sa /= n;
  sx /= n;
  double ssa = 0.0, ssx = 0.0, sax = 0.0;
  for (int i = 0; i < n; ++i) {
    const double asa = a[i] - sa;
    const double xsx = x[i] / range - sx;
    ssa += asa * asa;
    ssx += xsx * xsx;
    sax += asa * xsx;
  }
  // 1 - W, formed so that W near 1 keeps its precision
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);

  NormalityResult out;
  out.w = 1.0 - w1;
  if (n == 3) {
    constexpr double pi6 = 1.90985931710274;   // 6 / pi
    constexpr double stqr = 1.04719755119660;  // pi / 3
    out.p_value = std::max(0.0, pi6 * (std::asin(std::sqrt(out.w)) - stqr));
    return out;
  }
  static constexpr double g[] = {-2.273, 0.459};
  static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
  double y = std::log(w1);
  const double an = n;
  double mu, s;
  if (n <= 11) {
    const double gamma = poly(g, an);
    if (y >= gamma) {
      out.p_value = 1e-99;
      return out;
    }
    y = -std::log(gamma - y);
    mu = poly(c3, an);
    s = std::exp(poly(c4, an));
  } else {
    const double ln = std::log(an);
    mu = poly(c5, ln);
    s = std::exp(poly(c6, ln));
  }
  const boost::math::normal dist(mu, s);
  out.p_value = boost::math::cdf(boost::math::complement(dist, y));
  return out;
}

int default_max_lag(std::size_t n) { return static_cast<int>(std::min<std::size_t>(20, n / 5)); }

DiagnosticsReport diagnose(const FitResult& fit, int max_lag) {
  const auto& z = fit.innovations;
  if (z.empty()) throw DomainError("fit carries no residuals");
  if (max_lag <= 0) max_lag = default_max_lag(z.size());
  DiagnosticsReport out;
  out.whiteness = fisher_gallagher_test(z, max_lag, fit.spec.error_order());
  out.normality = shapiro_wilk(z);
  out.acf = sample_acf(z, max_lag);
  out.acf_band = 2.0 / std::sqrt(static_cast<double>(z.size()));
  out.whiteness_rejected = out.whiteness.p_value < kRejectLevel;
  out.normality_rejected = out.normality.p_value < kRejectLevel;
  return out;
}

}  // namespace trendshift
