#include "trendshift/ar_errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>
#include <gsl/gsl_multimin.h>

#include "trendshift/core_types.hpp"

namespace trendshift {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kBoundary = 1.0 - 1e-7;

double sum_squares(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

// Stationary covariance (in units of sigma^2) of the first q values, together
// with S = x' V^{-1} x + sum of squared one-step errors and log det V.
struct ProfileTerms {
  double ssq = 0.0;
  double logdet = 0.0;
};

ProfileTerms profile_terms(std::span<const double> eps, std::span<const double> phis) {
  const int p = static_cast<int>(phis.size());
  const int n = static_cast<int>(eps.size());
  ProfileTerms out;
  if (p == 0) {
    out.ssq = sum_squares(eps);
    return out;
  }
  if (p == 1) {
    const double phi = phis[0];
    const double w = 1.0 - phi * phi;
    double s = w * eps[0] * eps[0];
    for (int t = 1; t < n; ++t) {
      const double z = eps[t] - phi * eps[t - 1];
      s += z * z;
    }
    out.ssq = s;
    out.logdet = -std::log(w);
    return out;
  }
  const int q = std::min(p, n);
  const auto gamma = ar_autocovariance(ArModel{std::vector<double>(phis.begin(), phis.end()), 1.0}, q);
  Eigen::MatrixXd v(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) v(i, j) = gamma[std::abs(i - j)];
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  if (llt.info() != Eigen::Success) throw DomainError("AR stationary covariance is not positive definite");
  Eigen::VectorXd head = Eigen::Map<const Eigen::VectorXd>(eps.data(), q);
  Eigen::VectorXd y = llt.matrixL().solve(head);
  out.ssq = y.squaredNorm();
  const auto& l = llt.matrixL();
  Eigen::MatrixXd lm = l;
  for (int i = 0; i < q; ++i) out.logdet += 2.0 * std::log(lm(i, i));
  for (int t = p; t < n; ++t) {
    double z = eps[t];
    for (int j = 0; j < p; ++j) z -= phis[j] * eps[t - 1 - j];
    out.ssq += z * z;
  }
  return out;
}

double profile_neg2loglik(std::span<const double> eps, std::span<const double> phis) {
  const double n = static_cast<double>(eps.size());
  const auto terms = profile_terms(eps, phis);
  return n * (kLog2Pi + std::log(terms.ssq / n)) + terms.logdet + n;
}

struct NmContext {
  std::span<const double> eps;
  int p;
};

double nm_objective(const gsl_vector* u, void* params) {
  const auto* ctx = static_cast<const NmContext*>(params);
  std::vector<double> pacf(ctx->p);
  for (int i = 0; i < ctx->p; ++i) pacf[i] = std::tanh(gsl_vector_get(u, i));
  for (double& r : pacf) r = std::clamp(r, -kBoundary, kBoundary);
  const auto phis = pacf_to_ar(pacf);
  const double value = profile_neg2loglik(ctx->eps, phis);
  return std::isfinite(value) ? value : 1e300;
}

}  // namespace

std::vector<double> ar_to_pacf(std::span<const double> phis) {
  const int p = static_cast<int>(phis.size());
  std::vector<double> a(phis.begin(), phis.end());
  std::vector<double> pacf(p);
  for (int k = p; k >= 1; --k) {
    const double r = a[k - 1];
    if (!(std::abs(r) < 1.0)) return {};
    pacf[k - 1] = r;
    const double d = 1.0 - r * r;
    std::vector<double> next(k - 1);
    for (int j = 0; j < k - 1; ++j) next[j] = (a[j] + r * a[k - 2 - j]) / d;
    a = std::move(next);
  }
  return pacf;
}

std::vector<double> pacf_to_ar(std::span<const double> pacf) {
  std::vector<double> a;
  for (std::size_t k = 0; k < pacf.size(); ++k) {
    const double r = pacf[k];
    std::vector<double> next(k + 1);
    for (std::size_t j = 0; j < k; ++j) next[j] = a[j] - r * a[k - 1 - j];
    next[k] = r;
    a = std::move(next);
  }
  return a;
}

bool is_stationary(std::span<const double> phis) {
  return phis.empty() || !ar_to_pacf(phis).empty();
}

std::vector<double> ar_autocovariance(const ArModel& model, int lags) {
  if (!is_stationary(model.phis)) throw DomainError("AR model is not stationary");
  const int p = model.order();
  const double s2 = model.sigma * model.sigma;
  std::vector<double> gamma(std::max(lags, p) + 1, 0.0);
  if (p == 0) {
    gamma[0] = s2;
  } else {
    // gamma_k - sum_j phi_j gamma_|k-j| = sigma^2 [k == 0], k = 0..p
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(p + 1, p + 1);
    for (int k = 0; k <= p; ++k)
      for (int j = 1; j <= p; ++j) a(k, std::abs(k - j)) -= model.phis[j - 1];
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p + 1);
    b(0) = s2;
    Eigen::VectorXd g = a.fullPivLu().solve(b);
    for (int k = 0; k <= p; ++k) gamma[k] = g(k);
    for (int k = p + 1; k < static_cast<int>(gamma.size()); ++k) {
      double v = 0.0;
      for (int j = 1; j <= p; ++j) v += model.phis[j - 1] * gamma[k - j];
      gamma[k] = v;
    }
  }
  gamma.resize(lags + 1);
  return gamma;
}

double ar_loglik(std::span<const double> eps, const ArModel& model) {
  if (!(model.sigma > 0.0)) throw DomainError("AR innovation sigma must be positive");
  if (!is_stationary(model.phis)) throw DomainError("AR model is not stationary");
  const double n = static_cast<double>(eps.size());
  const auto terms = profile_terms(eps, model.phis);
  const double s2 = model.sigma * model.sigma;
  return -0.5 * (n * (kLog2Pi + std::log(s2)) + terms.logdet + terms.ssq / s2);
}

double ar1_mle_phi(std::span<const double> eps) {
  const std::size_t n = eps.size();
  double total = 0.0, cross = 0.0, interior = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double e2 = eps[t] * eps[t];
    total += e2;
    if (t > 0 && t + 1 < n) interior += e2;
    if (t > 0) cross += eps[t] * eps[t - 1];
  }
  return ar1_mle_phi(n, total, cross, interior);
}

double ar1_mle_phi(std::size_t n, double total, double cross, double interior) {
  // Score numerator: (N-1) A phi^3 - (N-2) S phi^2 - (N A + T) phi + N S,
  // positive at -1 and negative at +1 with a single root between.
  const double nn = static_cast<double>(n);
  const double c3 = (nn - 1.0) * interior;
  const double c2 = -(nn - 2.0) * cross;
  const double c1 = -(nn * interior + total);
  const double c0 = nn * cross;
  auto f = [&](double x) { return ((c3 * x + c2) * x + c1) * x + c0; };
  auto df = [&](double x) { return (3.0 * c3 * x + 2.0 * c2) * x + c1; };
  double lo = -1.0, hi = 1.0;
  double x = std::clamp(total > 0.0 ? cross / total : 0.0, -0.99, 0.99);
  for (int iter = 0; iter < 200; ++iter) {
    const double fx = f(x);
    if (fx > 0.0) lo = x; else hi = x;
    const double d = df(x);
    double next = (d != 0.0) ? x - fx / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) < 1e-15 || hi - lo < 1e-15) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

std::vector<double> yule_walker(std::span<const double> eps, int p) {
  const std::size_t n = eps.size();
  std::vector<double> c(p + 1, 0.0);
  for (int k = 0; k <= p; ++k) {
    for (std::size_t t = k; t < n; ++t) c[k] += eps[t] * eps[t - k];
    c[k] /= static_cast<double>(n);
  }
  if (!(c[0] > 0.0)) throw DegenerateError("zero-variance series");
  // Levinson-Durbin
  std::vector<double> a;
  double v = c[0];
  for (int k = 1; k <= p; ++k) {
    double acc = c[k];
    for (int j = 1; j < k; ++j) acc -= a[j - 1] * c[k - j];
    const double r = acc / v;
    std::vector<double> next(k);
    for (int j = 1; j < k; ++j) next[j - 1] = a[j - 1] - r * a[k - j - 1];
    next[k - 1] = r;
    a = std::move(next);
    v *= (1.0 - r * r);
  }
  return a;
}

ArFit fit_ar(std::span<const double> eps, int p) {
  if (p < 0) throw DomainError("AR order must be nonnegative");
  if (static_cast<int>(eps.size()) < p + 2) throw DomainError("series too short for AR order");
  const double n = static_cast<double>(eps.size());
  if (!(sum_squares(eps) > 0.0)) throw DegenerateError("zero-variance residuals: sigma estimate would be 0");

  ArFit fit;
  if (p == 0) {
    fit.model.sigma = std::sqrt(sum_squares(eps) / n);
  } else if (p == 1) {
    const double phi = ar1_mle_phi(eps);
    if (!(std::abs(phi) < kBoundary)) throw ConvergenceError("AR(1) estimate on the stationarity boundary");
    fit.model.phis = {phi};
  } else {
    auto start = ar_to_pacf(yule_walker(eps, p));
    if (start.empty()) start.assign(p, 0.0);
    NmContext ctx{eps, p};
    gsl_multimin_function fn{&nm_objective, static_cast<std::size_t>(p), &ctx};
    gsl_vector* x = gsl_vector_alloc(p);
    gsl_vector* step = gsl_vector_alloc(p);
    for (int i = 0; i < p; ++i) {
      gsl_vector_set(x, i, std::atanh(std::clamp(start[i], -0.95, 0.95)));
      gsl_vector_set(step, i, 0.1);
    }
    gsl_multimin_fminimizer* solver = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, p);
    gsl_multimin_fminimizer_set(solver, &fn, x, step);
    int status = GSL_CONTINUE;
    for (int iter = 0; iter < 5000 && status == GSL_CONTINUE; ++iter) {
      if (gsl_multimin_fminimizer_iterate(solver)) break;
      status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver), 1e-10);
    }
    std::vector<double> pacf(p);
    for (int i = 0; i < p; ++i) pacf[i] = std::tanh(gsl_vector_get(solver->x, i));
    gsl_multimin_fminimizer_free(solver);
    gsl_vector_free(x);
    gsl_vector_free(step);
    for (double r : pacf) {
      if (!(std::abs(r) < 1.0 - 1e-6)) throw ConvergenceError("AR estimate on the stationarity boundary");
    }
    fit.model.phis = pacf_to_ar(pacf);
  }
  if (p > 0) {
    const auto terms = profile_terms(eps, fit.model.phis);
    fit.model.sigma = std::sqrt(terms.ssq / n);
  }
  if (!(fit.model.sigma > 0.0)) throw DegenerateError("sigma estimate is 0");
  fit.loglik = ar_loglik(eps, fit.model);
  return fit;
}

std::vector<double> sample_acf(std::span<const double> series, int max_lag) {
  const int n = static_cast<int>(series.size());
  if (max_lag < 0 || max_lag >= n) throw DomainError("max_lag must be in 0..N-1");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  if (!(c0 > 0.0)) throw DomainError("sample autocorrelation of a constant series");
  std::vector<double> r(max_lag);
  for (int k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (int t = k; t < n; ++t) ck += (series[t] - mean) * (series[t - k] - mean);
    r[k - 1] = ck / c0;
  }
  return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : engine_(splitmix64(splitmix64(master_seed) ^ splitmix64(stream_index + 0x632be59bd9b4e019ULL))) {}

void simulate_ar1_into(double phi, double sigma, std::span<double> out, RandomStream& rng) {
  if (!(std::abs(phi) < 1.0)) throw DomainError("AR(1) simulation needs |phi| < 1");
  if (!(sigma > 0.0)) throw DomainError("AR(1) simulation needs sigma > 0");
  if (out.empty()) return;
  out[0] = sigma / std::sqrt(1.0 - phi * phi) * rng.normal();
  for (std::size_t t = 1; t < out.size(); ++t) out[t] = phi * out[t - 1] + sigma * rng.normal();
}

std::vector<double> simulate_ar1(const ArModel& model, std::size_t n, RandomStream& rng) {
  if (model.order() > 1) throw DomainError("simulate_ar1 takes an order 0 or 1 model");
  if (n < 1) throw DomainError("simulation length must be >= 1");
  std::vector<double> out(n);
  simulate_ar1_into(model.order() == 1 ? model.phis[0] : 0.0, model.sigma, out, rng);
  return out;
}

}  // namespace trendshift
