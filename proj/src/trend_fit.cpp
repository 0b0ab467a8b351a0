#include "trendshift/trend_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trendshift/penalty.hpp"

namespace trendshift {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kPhiBoundary = 1.0 - 1e-7;
// Residual energy below this fraction of the data energy counts as an exact fit.
constexpr double kExactFitRatio = 1e-24;

struct Ar1Moments {
  double total = 0.0;
  double cross = 0.0;
  double interior = 0.0;
};

double ar1_profile_loglik(std::size_t n, double phi, const Ar1Moments& mom, double* sigma_out) {
  const double q = mom.total - 2.0 * phi * mom.cross + phi * phi * mom.interior;
  const double nn = static_cast<double>(n);
  const double s2 = q / nn;
  if (sigma_out) *sigma_out = std::sqrt(s2);
  return -0.5 * (nn * (kLog2Pi + std::log(s2)) - std::log(1.0 - phi * phi) + nn);
}

// Regression with stationary AR(1) errors on K fixed regressors, alternating
// Prais-Winsten GLS with the closed-form exact AR(1) MLE.
template <int K>
struct Ar1Regression {
  Eigen::Matrix<double, K, 1> coef;
  Eigen::Matrix<double, K, K> xtx_inv;  // whitened (X' R^-1 X)^-1, unit innovation scale
  double phi = 0.0;
  double sigma = 0.0;
  double loglik = 0.0;
  int iterations = 0;
  bool exact = false;
};

template <int K, class RowFn>
Ar1Regression<K> ar1_regression(std::span<const double> y, RowFn row) {
  using Vec = Eigen::Matrix<double, K, 1>;
  using Mat = Eigen::Matrix<double, K, K>;
  const std::size_t n = y.size();
  double energy = 0.0;
  for (double v : y) energy += v * v;

  Ar1Regression<K> out;
  double phi = 0.0;
  double prev = -std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= kMaxFitIterations; ++iter) {
    Mat xtx = Mat::Zero();
    Vec xty = Vec::Zero();
    const double w0 = std::sqrt(1.0 - phi * phi);
    Vec prev_row = row(0);
    {
      const Vec r = w0 * prev_row;
      xtx.noalias() += r * r.transpose();
      xty += r * (w0 * y[0]);
    }
    for (std::size_t i = 1; i < n; ++i) {
      const Vec cur = row(i);
      const Vec r = cur - phi * prev_row;
      const double yt = y[i] - phi * y[i - 1];
      xtx.noalias() += r * r.transpose();
      xty += r * yt;
      prev_row = cur;
    }
    const Mat inv = xtx.inverse();
    if (!inv.allFinite()) throw DomainError("rank-deficient trend design");
    out.coef = inv * xty;
    out.xtx_inv = inv;
    out.iterations = iter;

    Ar1Moments mom;
    double e_prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - row(i).dot(out.coef);
      mom.total += e * e;
      if (i > 0) mom.cross += e * e_prev;
      if (i > 0 && i + 1 < n) mom.interior += e * e;
      e_prev = e;
    }
    if (mom.total <= kExactFitRatio * energy) {
      out.exact = true;
      out.phi = phi;
      out.sigma = 0.0;
      out.loglik = std::numeric_limits<double>::infinity();
      return out;
    }
    const double next_phi = ar1_mle_phi(n, mom.total, mom.cross, mom.interior);
    if (!(std::abs(next_phi) < kPhiBoundary)) throw ConvergenceError("AR(1) estimate on the stationarity boundary");
    out.phi = next_phi;
    out.loglik = ar1_profile_loglik(n, next_phi, mom, &out.sigma);
    if (std::abs(out.loglik - prev) < kLoglikTolerance) return out;
    prev = out.loglik;
    phi = next_phi;
  }
  throw ConvergenceError("GLS/AR(1) iteration did not converge in " + std::to_string(kMaxFitIterations) +
                         " rounds");
}

// Error-model parameters during the GLS iteration.
struct ErrorState {
  std::vector<std::vector<double>> phis;  // global: one entry
  std::vector<double> sigmas;
  double loglik = 0.0;
};

// Whiten the columns of `m` in place so that OLS on the result is GLS.
void whiten(Eigen::MatrixXd& m, const Segmentation& seg, const ModelSpec& spec, const ErrorState& err) {
  const int n = static_cast<int>(m.rows());
  if (spec.errors == ErrorKind::independent) return;
  if (spec.errors == ErrorKind::piecewise_ar1) {
    for (std::size_t i = 1; i <= seg.segment_count(); ++i) {
      const int a = seg.boundary(i - 1);
      const int b = seg.boundary(i);
      const double phi = err.phis[i - 1][0];
      const double inv_sigma = 1.0 / err.sigmas[i - 1];
      for (int t = b - 1; t > a; --t) m.row(t) = (m.row(t) - phi * m.row(t - 1)) * inv_sigma;
      m.row(a) *= std::sqrt(1.0 - phi * phi) * inv_sigma;
    }
    return;
  }
  const auto& phis = err.phis[0];
  const int p = static_cast<int>(phis.size());
  const int q = std::min(p, n);
  Eigen::MatrixXd head = m.topRows(q);
  for (int t = n - 1; t >= p; --t) {
    Eigen::RowVectorXd r = m.row(t);
    for (int j = 1; j <= p; ++j) r -= phis[j - 1] * m.row(t - j);
    m.row(t) = r;
  }
  const auto gamma = ar_autocovariance(ArModel{phis, 1.0}, q);
  Eigen::MatrixXd v(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) v(i, j) = gamma[std::abs(i - j)];
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  m.topRows(q) = llt.matrixL().solve(head);
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < x.cols()) throw DomainError("rank-deficient trend design");
  return qr.solve(y);
}

ErrorState fit_errors(const Eigen::VectorXd& resid, const Segmentation& seg, const ModelSpec& spec) {
  ErrorState st;
  std::span<const double> all(resid.data(), static_cast<std::size_t>(resid.size()));
  if (spec.errors == ErrorKind::piecewise_ar1) {
    for (std::size_t i = 1; i <= seg.segment_count(); ++i) {
      const int a = seg.boundary(i - 1);
      const auto fit = fit_ar(all.subspan(a, seg.segment_length(i)), 1);
      st.phis.push_back(fit.model.phis);
      st.sigmas.push_back(fit.model.sigma);
      st.loglik += fit.loglik;
    }
  } else {
    const auto fit = fit_ar(all, spec.error_order());
    st.phis.push_back(fit.model.phis);
    st.sigmas.push_back(fit.model.sigma);
    st.loglik = fit.loglik;
  }
  return st;
}

void fill_trend_parameters(FitResult& out, const Eigen::VectorXd& coef) {
  const std::size_t segs = out.seg.segment_count();
  out.alphas.assign(segs, 0.0);
  out.betas.assign(segs, 0.0);
  if (out.spec.trend == TrendKind::discontinuous) {
    for (std::size_t i = 0; i < segs; ++i) {
      out.alphas[i] = coef(2 * i);
      out.betas[i] = coef(2 * i + 1);
    }
    return;
  }
  out.alphas[0] = coef(0);
  for (std::size_t i = 0; i < segs; ++i) out.betas[i] = coef(i + 1);
  // alpha_{i+1} = alpha_i + (beta_i - beta_{i+1}) tau_i
  for (std::size_t i = 1; i < segs; ++i) {
    out.alphas[i] = out.alphas[i - 1] + (out.betas[i - 1] - out.betas[i]) * out.seg.boundary(i);
  }
}

void finish(FitResult& out, std::span<const double> values) {
  const std::size_t n = values.size();
  out.fitted.resize(n);
  out.residuals.resize(n);
  for (std::size_t t = 1; t <= n; ++t) {
    const std::size_t r = regime_index(static_cast<int>(t), out.seg) - 1;
    out.fitted[t - 1] = out.alphas[r] + out.betas[r] * static_cast<double>(t);
    out.residuals[t - 1] = values[t - 1] - out.fitted[t - 1];
  }
  out.innovations = residuals(out).innovations;
  out.parameter_count = parameter_count(out.seg.m(), out.spec);
  out.objective = -2.0 * out.loglik + penalty_value(out.seg.m(), out.spec, n);
}

FitResult fit_discontinuous_piecewise(std::span<const double> values, const Segmentation& seg,
                                      const ModelSpec& spec) {
  FitResult out;
  out.spec = spec;
  out.seg = seg;
  for (std::size_t i = 1; i <= seg.segment_count(); ++i) {
    const auto s = fit_segment_ar1(values, seg.boundary(i - 1) + 1, seg.boundary(i));
    out.alphas.push_back(s.alpha);
    out.betas.push_back(s.beta);
    out.phis.push_back({s.phi});
    out.sigmas.push_back(s.sigma);
    out.loglik += s.loglik;
    out.iterations = std::max(out.iterations, s.iterations);
  }
  finish(out, values);
  return out;
}

}  // namespace

Eigen::MatrixXd design_matrix(const Segmentation& seg, TrendKind trend) {
  const int n = static_cast<int>(seg.n());
  const std::size_t segs = seg.segment_count();
  if (trend == TrendKind::discontinuous) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, 2 * segs);
    for (int t = 1; t <= n; ++t) {
      const std::size_t r = regime_index(t, seg) - 1;
      x(t - 1, 2 * r) = 1.0;
      x(t - 1, 2 * r + 1) = t;
    }
    return x;
  }
  Eigen::MatrixXd x(n, segs + 1);
  for (int t = 1; t <= n; ++t) {
    x(t - 1, 0) = 1.0;
    for (std::size_t j = 1; j <= segs; ++j) {
      const int lo = seg.boundary(j - 1);
      const int hi = seg.boundary(j);
      x(t - 1, j) = std::clamp(t, lo, hi) - lo;
    }
  }
  return x;
}

SegmentFit fit_segment_ar1(std::span<const double> values, int a, int b) {
  if (a < 1 || b > static_cast<int>(values.size()) || b - a + 1 < 3) {
    throw DomainError("segment too short for a trend with AR(1) errors");
  }
  const double center = 0.5 * (a + b);
  auto row = [&](std::size_t i) {
    return Eigen::Vector2d(1.0, static_cast<double>(a + static_cast<int>(i)) - center);
  };
  const auto reg = ar1_regression<2>(values.subspan(a - 1, b - a + 1), row);
  if (reg.exact) throw DegenerateError("zero residual variance in segment");
  SegmentFit out;
  out.beta = reg.coef(1);
  out.alpha = reg.coef(0) - out.beta * center;
  out.phi = reg.phi;
  out.sigma = reg.sigma;
  out.loglik = reg.loglik;
  out.iterations = reg.iterations;
  return out;
}

FitResult fit_at(std::span<const double> values, const Segmentation& seg, const ModelSpec& spec) {
  spec.validate();
  if (seg.n() != values.size()) throw DomainError("segmentation length does not match the series");
  if (seg.min_segment_length() < spec.min_seg_len) throw DomainError("segment shorter than min_seg_len");

  if (spec.trend == TrendKind::discontinuous && spec.errors == ErrorKind::piecewise_ar1) {
    return fit_discontinuous_piecewise(values, seg, spec);
  }

  const Eigen::MatrixXd x = design_matrix(seg, spec.trend);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
  const double energy = y.squaredNorm();
  const double n = static_cast<double>(values.size());

  FitResult out;
  out.spec = spec;
  out.seg = seg;
  Eigen::VectorXd coef = least_squares(x, y);

  if (spec.errors == ErrorKind::independent) {
    const double rss = (y - x * coef).squaredNorm();
    out.iterations = 1;
    if (rss <= kExactFitRatio * energy) {
      out.sigmas = {0.0};
      out.loglik = std::numeric_limits<double>::infinity();
    } else {
      const double s2 = rss / n;
      out.sigmas = {std::sqrt(s2)};
      out.loglik = -0.5 * n * (kLog2Pi + std::log(s2) + 1.0);
    }
    out.phis = {{}};
    fill_trend_parameters(out, coef);
    finish(out, values);
    return out;
  }

  double prev = -std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= kMaxFitIterations; ++iter) {
    const Eigen::VectorXd resid = y - x * coef;
    if (resid.squaredNorm() <= kExactFitRatio * energy) {
      throw DegenerateError("zero residual variance: the trend fits the data exactly");
    }
    ErrorState err = fit_errors(resid, seg, spec);
    out.phis = err.phis;
    out.sigmas = err.sigmas;
    out.loglik = err.loglik;
    out.iterations = iter;
    fill_trend_parameters(out, coef);
    if (std::abs(err.loglik - prev) < kLoglikTolerance) {
      finish(out, values);
      return out;
    }
    prev = err.loglik;
    Eigen::MatrixXd aug(x.rows(), x.cols() + 1);
    aug << x, y;
    whiten(aug, seg, spec, err);
    coef = least_squares(aug.leftCols(x.cols()), aug.col(x.cols()));
  }
  finish(out, values);
  throw ConvergenceError("GLS/AR iteration did not converge in " + std::to_string(kMaxFitIterations) +
                         " rounds (last loglik " + std::to_string(out.loglik) + ")");
}

FitResult fit_at(const AnnualSeries& series, const Segmentation& seg, const ModelSpec& spec) {
  return fit_at(series.values(), seg, spec);
}

namespace {

Eigen::Vector3d single_break_row(int t, int k, double center) {
  return Eigen::Vector3d(1.0, t - center, t > k ? static_cast<double>(t - k) : 0.0);
}

}  // namespace

double slope_diff_variance(int n, int k, double phi, double sigma) {
  if (!(std::abs(phi) < 1.0)) throw DomainError("slope variance needs |phi| < 1");
  if (!(sigma >= 0.0)) throw DomainError("slope variance needs sigma >= 0");
  if (k < 2 || k > n - 1) throw DomainError("changepoint must leave points on both sides");
  const double center = 0.5 * (n + 1);
  Eigen::Matrix3d xtx = Eigen::Matrix3d::Zero();
  const double w0 = std::sqrt(1.0 - phi * phi);
  Eigen::Vector3d prev = single_break_row(1, k, center);
  xtx += (w0 * prev) * (w0 * prev).transpose();
  for (int t = 2; t <= n; ++t) {
    const Eigen::Vector3d cur = single_break_row(t, k, center);
    const Eigen::Vector3d r = cur - phi * prev;
    xtx += r * r.transpose();
    prev = cur;
  }
  const Eigen::Matrix3d inv = xtx.inverse();
  if (!inv.allFinite()) throw DomainError("rank-deficient single-break design");
  return sigma * sigma * inv(2, 2);
}

double slope_diff_variance(const FitResult& fit) {
  if (fit.spec.trend != TrendKind::continuous || fit.seg.m() != 1 || fit.phis.size() != 1 ||
      fit.phis[0].size() != 1) {
    throw DomainError("slope_diff_variance needs a single-break continuous fit with global AR(1) errors");
  }
  return slope_diff_variance(static_cast<int>(fit.seg.n()), fit.seg.taus()[0], fit.phis[0][0],
                             fit.sigmas[0]);
}

SingleBreakFit fit_single_break(std::span<const double> values, int k) {
  const int n = static_cast<int>(values.size());
  if (k < 2 || k > n - 2) throw DomainError("single-break changepoint out of range");
  const double center = 0.5 * (n + 1);
  auto row = [&](std::size_t i) { return single_break_row(static_cast<int>(i) + 1, k, center); };
  const auto reg = ar1_regression<3>(values, row);
  SingleBreakFit out;
  out.beta1 = reg.coef(1);
  out.beta2 = reg.coef(1) + reg.coef(2);
  out.alpha1 = reg.coef(0) - out.beta1 * center;
  out.phi = reg.phi;
  out.sigma = reg.sigma;
  out.loglik = reg.loglik;
  out.iterations = reg.iterations;
  out.exact = reg.exact;
  // xtx_inv was computed at the previous phi; refresh at the final estimate.
  out.var_diff = reg.exact ? 0.0 : slope_diff_variance(n, k, reg.phi, reg.sigma);
  return out;
}

ResidualSeries residuals(const FitResult& fit) {
  ResidualSeries out;
  out.trend = fit.residuals;
  const std::size_t n = fit.residuals.size();
  out.innovations.resize(n);
  const bool piecewise = fit.phis.size() > 1 || fit.spec.errors == ErrorKind::piecewise_ar1;
  for (std::size_t t = 1; t <= n; ++t) {
    const std::size_t r = regime_index(static_cast<int>(t), fit.seg);
    const std::size_t seg_start = piecewise ? static_cast<std::size_t>(fit.seg.boundary(r - 1)) + 1 : 1;
    const auto& phis = fit.phis.empty() ? std::vector<double>{} : fit.phis[piecewise ? r - 1 : 0];
    double z = fit.residuals[t - 1];
    for (std::size_t j = 1; j <= phis.size() && t - j >= seg_start; ++j) z -= phis[j - 1] * fit.residuals[t - j - 1];
    out.innovations[t - 1] = z;
  }
  return out;
}

}  // namespace trendshift
