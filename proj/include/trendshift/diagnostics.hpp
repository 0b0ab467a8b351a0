#pragma once

#include <span>
#include <vector>

#include "trendshift/core_types.hpp"

namespace trendshift {

struct PortmanteauResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int max_lag = 0;
  int fitted_order = 0;
  double shape = 0.0;  // gamma approximation to the null distribution
  double scale = 0.0;
};

/// Weighted Ljung-Box statistic
///   N (N+2) sum_k ((L - k + 1) / L) r_k^2 / (N - k),  k = 1..L,
/// referred to a gamma distribution matching its null mean and variance
/// after removing `fitted_order` autoregressive parameters.
/// Needs max_lag < N / 2 and max_lag > 2 fitted_order.
PortmanteauResult fisher_gallagher_test(std::span<const double> residuals, int max_lag, int fitted_order);

struct NormalityResult {
  double w = 1.0;
  double p_value = 1.0;
};

/// Shapiro-Wilk W with Royston's normalising approximation for the p-value.
/// 3 <= n <= 5000; a constant sample is a domain error.
NormalityResult shapiro_wilk(std::span<const double> sample);

inline constexpr double kRejectLevel = 0.05;

struct DiagnosticsReport {
  PortmanteauResult whiteness;
  NormalityResult normality;
  std::vector<double> acf;  // r_1..r_max_lag of the innovation residuals
  double acf_band = 0.0;    // 2 / sqrt(N)
  bool whiteness_rejected = false;
  bool normality_rejected = false;

  bool rejected() const { return whiteness_rejected || normality_rejected; }
};

/// 20 lags for long series, 10 for short ones: min(20, N / 5).
int default_max_lag(std::size_t n);

/// Tests the innovation residuals of a fit. max_lag <= 0 picks the default.
DiagnosticsReport diagnose(const FitResult& fit, int max_lag = 0);

}  // namespace trendshift
