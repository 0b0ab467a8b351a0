#pragma once

// Independent reference computations shared by the tests. Nothing here calls
// the library's own likelihood or GLS code.

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace testing {

inline std::filesystem::path data_dir() { return TRENDSHIFT_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return TRENDSHIFT_FIXTURE_DIR; }
inline std::filesystem::path hadcrut_path() {
  return data_dir() / "HadCRUT.5.0.1.0.analysis.summary_series.global.annual.csv";
}

/// Durbin-Levinson: partial autocorrelations to AR coefficients.
inline std::vector<double> levinson(const std::vector<double>& pacf) {
  std::vector<double> phi;
  for (std::size_t k = 0; k < pacf.size(); ++k) {
    std::vector<double> next(k + 1);
    next[k] = pacf[k];
    for (std::size_t j = 0; j < k; ++j) next[j] = phi[j] - pacf[k] * phi[k - 1 - j];
    phi = next;
  }
  return phi;
}

/// Autocovariances from the causal MA(infinity) weights, truncated once the
/// weights have decayed below 1e-17.
inline std::vector<double> ma_autocovariance(const std::vector<double>& phi, double sigma, int lags) {
  std::vector<double> psi{1.0};
  const std::size_t p = phi.size();
  for (std::size_t j = 1; j < 200000; ++j) {
    double v = 0.0;
    for (std::size_t i = 1; i <= std::min(p, j); ++i) v += phi[i - 1] * psi[j - i];
    psi.push_back(v);
    if (j > 50 && std::abs(v) < 1e-17 && std::abs(psi[j - 1]) < 1e-17) break;
  }
  std::vector<double> g(static_cast<std::size_t>(lags) + 1, 0.0);
  for (int h = 0; h <= lags; ++h) {
    for (std::size_t j = 0; j + h < psi.size(); ++j) g[h] += psi[j] * psi[j + h];
    g[h] *= sigma * sigma;
  }
  return g;
}

inline Eigen::MatrixXd toeplitz(const std::vector<double>& g, int n) {
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s(i, j) = g[static_cast<std::size_t>(std::abs(i - j))];
  }
  return s;
}

/// log N(x; 0, cov) by Cholesky.
inline double dense_gaussian_loglik(const Eigen::VectorXd& x, const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::VectorXd z = l.triangularView<Eigen::Lower>().solve(x);
  const double logdet = 2.0 * l.diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi) + logdet + z.squaredNorm());
}

/// Continuous single-break design [1, min(t,k), max(t-k,0)].
inline Eigen::MatrixXd single_break_design(int n, int k) {
  Eigen::MatrixXd x(n, 3);
  for (int t = 1; t <= n; ++t) {
    x(t - 1, 0) = 1.0;
    x(t - 1, 1) = std::min(t, k);
    x(t - 1, 2) = std::max(t - k, 0);
  }
  return x;
}

/// c' (X' S^-1 X)^-1 c for the slope-difference contrast, dense AR(1) S.
inline double dense_slope_diff_variance(int n, int k, double phi, double sigma) {
  const Eigen::MatrixXd x = single_break_design(n, k);
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s(i, j) = sigma * sigma * std::pow(phi, std::abs(i - j)) / (1.0 - phi * phi);
  }
  const Eigen::MatrixXd info = x.transpose() * s.ldlt().solve(x);
  Eigen::Vector3d c(0.0, -1.0, 1.0);
  return c.dot(info.ldlt().solve(c));
}

inline std::vector<double> normals(std::mt19937_64& rng, std::size_t n, double sd = 1.0) {
  std::normal_distribution<double> z(0.0, sd);
  std::vector<double> out(n);
  for (double& v : out) v = z(rng);
  return out;
}

/// AR(1) path with a stationary start, using std::normal_distribution (not
/// the library's generator).
inline std::vector<double> ar1_path(std::mt19937_64& rng, std::size_t n, double phi, double sigma) {
  std::normal_distribution<double> z(0.0, sigma);
  std::vector<double> e(n);
  e[0] = z(rng) / std::sqrt(1.0 - phi * phi);
  for (std::size_t t = 1; t < n; ++t) e[t] = phi * e[t - 1] + z(rng);
  return e;
}

}  // namespace testing
