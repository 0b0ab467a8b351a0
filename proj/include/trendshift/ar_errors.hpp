#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <boost/random/normal_distribution.hpp>

namespace trendshift {

/// Causal Gaussian AR(p): eps_t = sum_j phi_j eps_{t-j} + Z_t, Z_t ~ N(0, sigma^2).
/// Order 0 is white noise.
struct ArModel {
  std::vector<double> phis;
  double sigma = 1.0;

  int order() const { return static_cast<int>(phis.size()); }
};

struct ArFit {
  ArModel model;
  double loglik = 0.0;
};

/// Partial autocorrelations of a coefficient vector via the step-down
/// recursion. Empty if some partial autocorrelation has modulus >= 1.
std::vector<double> ar_to_pacf(std::span<const double> phis);
std::vector<double> pacf_to_ar(std::span<const double> pacf);
bool is_stationary(std::span<const double> phis);

/// Autocovariances gamma_0..gamma_lags of a stationary AR model.
std::vector<double> ar_autocovariance(const ArModel& model, int lags);

/// Exact Gaussian log-likelihood of a zero-mean series, with the first
/// min(p, N) values drawn from the stationary distribution.
double ar_loglik(std::span<const double> eps, const ArModel& model);

/// Exact maximum likelihood, started from Yule-Walker. Throws DegenerateError
/// on zero variance and ConvergenceError when the optimum sits on the
/// stationarity boundary.
ArFit fit_ar(std::span<const double> eps, int p);

/// Closed-form exact AR(1) MLE: the profile-likelihood score is a cubic with a
/// single root in (-1, 1).
double ar1_mle_phi(std::span<const double> eps);
/// Same from the sufficient statistics: total = sum e_t^2, cross =
/// sum e_t e_{t-1}, interior = sum of e_t^2 over t = 2..N-1.
double ar1_mle_phi(std::size_t n, double total, double cross, double interior);

/// Biased (divide by N) sample autocorrelations r_1..r_max_lag of the
/// demeaned series.
std::vector<double> sample_acf(std::span<const double> series, int max_lag);

/// Yule-Walker coefficients from the biased sample autocovariances.
std::vector<double> yule_walker(std::span<const double> eps, int p);

/// Seedable normal stream. Streams are std::mt19937_64 seeded with the
/// SplitMix64 mix of (master seed, stream index), so replicate r sees the same
/// draws regardless of which worker runs it. Normals use Boost's ziggurat
/// sampler, which is identical across standard libraries.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_index);

  double normal() { return normal_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Stationary AR(1) path: eps_1 ~ N(0, sigma^2/(1-phi^2)).
std::vector<double> simulate_ar1(const ArModel& model, std::size_t n, RandomStream& rng);
void simulate_ar1_into(double phi, double sigma, std::span<double> out, RandomStream& rng);

}  // namespace trendshift
