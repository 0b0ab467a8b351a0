#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trendshift/core_types.hpp"

namespace trendshift {

/// Straight-line trend with AR(1) errors: the data-generating process of the
/// slope-difference test under the no-surge hypothesis.
struct NullParams {
  double alpha1 = 0.0;
  double beta1 = 0.0;
  double phi = 0.0;
  double sigma = 1.0;
  int n = 0;

  void validate() const;
};

/// Published 1970-onward null estimates for "nasa", "hadcrut", "noaa",
/// "berkeley" (case-insensitive, "-null" suffix accepted).
NullParams null_preset(std::string_view name, int n);
std::vector<std::string> null_preset_names();

/// Candidate changepoint times after trimming 10% at both ends:
/// ceil(0.1 N) .. floor(0.9 N).
struct AdmissibleRange {
  int lo = 0;
  int hi = 0;
};
AdmissibleRange admissible_range(int n);

/// Slope-difference statistic for a single continuous break after time k,
/// (beta2_hat - beta1_hat) / sd, under AR(1) errors estimated at that k.
/// Noise-free data give 0 when the slopes agree and +-inf otherwise.
double t_statistic(std::span<const double> values, int k);

struct TMax {
  double t = 0.0;      // max |T_k|
  int k = 0;           // arg max, earliest on ties
  double signed_t = 0.0;
};
/// Maximum |T_k| over the admissible range. Needs N >= 20.
TMax t_max(std::span<const double> values);

/// Two-sided fixed-k critical value: Student t quantile with N - 3 df.
double fixed_k_critical_value(int n, double level);

struct QuantileEstimate {
  double q = 0.0;
  double mc_se = 0.0;  // from order statistics around the target rank
  double level = 0.0;
  int reps = 0;
};

/// T_max for `reps` series simulated under `null`. Replicate r uses stream
/// (seed, r), so the values do not depend on `threads`.
std::vector<double> simulate_tmax(const NullParams& null, int reps, std::uint64_t seed, int threads = 0);

/// Type-7 quantile of a sample, with a Monte Carlo standard error taken from
/// the order statistics at n p +- 1.96 sqrt(n p (1 - p)).
QuantileEstimate sample_quantile(std::vector<double> sample, double level);

/// Monte Carlo level-quantile of T_max under the null. Needs reps >= 1000.
QuantileEstimate mc_null_quantile(const NullParams& null, int reps, double level, std::uint64_t seed,
                                  int threads = 0);

struct MinDetectable {
  double slope = 0.0;  // smallest post-surge slope reaching the threshold
  double pct = 0.0;    // 100 (slope - baseline) / baseline
  double sd = 0.0;     // sd(beta2_hat - beta1_hat) under the null AR parameters
};

/// Smallest post-surge slope with |T_k| = q, for a break after time k in a
/// series of length n: baseline_slope + q sd. The error parameters come from
/// `null`; baseline_slope is the estimated pre-surge slope.
MinDetectable min_detectable_slope(const NullParams& null, double baseline_slope, int k, int n, double q);

/// Pre-surge slope estimate at each surge year, from single-break fits on the
/// observed series.
std::vector<double> baseline_slopes(const AnnualSeries& series, std::span<const int> surge_years);

struct SurgeGrid {
  int start_year = 0;
  std::vector<int> surge_years;
  std::vector<int> vantage_years;
  std::vector<double> baseline;                // per surge year
  std::vector<QuantileEstimate> quantiles;     // per vantage year
  std::vector<std::vector<double>> min_pct;    // [surge][vantage]
  std::vector<std::vector<double>> min_slope;  // [surge][vantage]
};

/// Minimum detectable surge for every (surge year, vantage year) cell. The
/// threshold for each vantage year is simulated separately at the implied
/// length; all lengths share the master seed.
SurgeGrid surge_grid(const NullParams& null, std::span<const double> baseline, int start_year,
                     std::span<const int> surge_years, std::span<const int> vantage_years, int reps,
                     std::uint64_t seed, int threads = 0, double level = 0.95);

}  // namespace trendshift
