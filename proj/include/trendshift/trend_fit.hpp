#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "trendshift/ar_errors.hpp"
#include "trendshift/core_types.hpp"

namespace trendshift {

/// Regression design for a fixed segmentation, rows t = 1..N.
///
/// Discontinuous: per-segment intercept and slope indicators, 2(m+1) columns.
/// Continuous: the free-parameter form alpha_1, beta_1..beta_{m+1}, where the
/// column for beta_j is the time elapsed inside segment j up to t. Continuity
/// at every changepoint holds by construction, giving m+2 columns.
Eigen::MatrixXd design_matrix(const Segmentation& seg, TrendKind trend);

inline constexpr double kLoglikTolerance = 1e-8;
inline constexpr int kMaxFitIterations = 100;

/// Joint maximum likelihood of the trend and the error model at a fixed
/// segmentation. Alternates exact GLS for the regression coefficients with
/// exact AR maximum likelihood on the residuals until the log-likelihood moves
/// less than 1e-8 (at most 100 rounds).
///
/// Independent errors with a perfect fit return loglik = +inf and sigma 0.
/// Throws DomainError on rank deficiency or too-short segments,
/// DegenerateError when an AR model sees zero residual variance, and
/// ConvergenceError when the iteration cap is reached.
FitResult fit_at(std::span<const double> values, const Segmentation& seg, const ModelSpec& spec);
FitResult fit_at(const AnnualSeries& series, const Segmentation& seg, const ModelSpec& spec);

/// Exact log-likelihood of one segment a..b (1-based, inclusive) under its own
/// intercept, slope and AR(1) errors. This is the additive segment cost used by
/// discontinuous piecewise-AR(1) fits.
struct SegmentFit {
  double alpha = 0.0;
  double beta = 0.0;
  double phi = 0.0;
  double sigma = 0.0;
  double loglik = 0.0;
  int iterations = 0;
};
SegmentFit fit_segment_ar1(std::span<const double> values, int a, int b);

/// Var(beta_2_hat - beta_1_hat) for the single continuous changepoint model
/// with a break after time k in a series of length n and AR(1) errors.
double slope_diff_variance(int n, int k, double phi, double sigma);
/// Same, using the estimated error parameters of a single-break continuous
/// global AR(1) fit.
double slope_diff_variance(const FitResult& fit);

/// Single continuous changepoint fit with global AR(1) errors, specialised for
/// the slope-difference test (no heap allocation in the inner loop).
/// Equivalent to fit_at with m = 1, continuous trend, global AR(1).
struct SingleBreakFit {
  double alpha1 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double phi = 0.0;
  double sigma = 0.0;
  double loglik = 0.0;
  double var_diff = 0.0;
  int iterations = 0;
  bool exact = false;  // residuals vanish; var_diff is 0
};
SingleBreakFit fit_single_break(std::span<const double> values, int k);

struct ResidualSeries {
  std::vector<double> trend;        // eps_hat_t
  std::vector<double> innovations;  // Z_hat_t, AR filter applied within segments
};
ResidualSeries residuals(const FitResult& fit);

}  // namespace trendshift
