#include "trendshift/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "trendshift/parallel.hpp"

namespace trendshift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;

double prune_slack(double incumbent) { return 1e-9 * std::max(1.0, std::abs(incumbent)); }

// Lower bounds on -2 ln L that add over segments, plus the monotone map from
// the summed bound to a bound on -2 ln L of the whole series.
//
// Independent and global AR(p) errors share one innovation variance, so the
// additive part is a residual sum of squares S and the whole-series bound is
// N (ln(2 pi S / N) + 1). For AR(p) the sum runs over points whose p lags lie
// in the same segment, fitted by least squares on (1, t, lags) per segment;
// every other density factor is at most (2 pi sigma^2)^(-1/2).
class SegmentBounds {
 public:
  SegmentBounds(std::span<const double> values, const ModelSpec& spec) : values_(values), spec_(spec) {
    const int n = static_cast<int>(values.size());
    table_.assign(static_cast<std::size_t>(n + 2) * (n + 2), kInf);
    const int len = spec.min_seg_len;
    parallel_for(static_cast<std::size_t>(n), 0, [&](std::size_t i) {
      const int a = static_cast<int>(i) + 1;
      for (int b = a + len - 1; b <= n; ++b) at(a, b) = segment_bound(a, b);
    });
    if (has_prefix_bound()) build_moments();
  }

  double segment(int a, int b) const { return at(a, b); }

  /// Bound on -2 ln L given the summed segment bounds.
  double whole(double total) const {
    if (spec_.errors == ErrorKind::piecewise_ar1) return total;
    const double n = static_cast<double>(values_.size());
    if (!(total > 0.0)) return -kInf;
    return n * (kLog2Pi + std::log(total / n) + 1.0);
  }

  std::size_t evaluations() const { return table_.size(); }

  /// Continuous independent errors only: least squares over 1..end with the
  /// trend continuous at `kinks`. It replaces the segment bounds of that
  /// stretch and is never below their sum. Not valid with AR errors:
  /// quasi-differencing a continuous trend leaves a per-segment constant
  /// (sum_i i phi_i) beta_j that the continuous columns cannot absorb.
  bool has_prefix_bound() const {
    return spec_.trend == TrendKind::continuous && spec_.errors == ErrorKind::independent;
  }
  double continuous_prefix(std::span<const int> kinks, int end) const {
    const int segs = static_cast<int>(kinks.size()) + 1;
    const int k = 1 + segs;
    // Normal equations from cumulative moments. Over the rows of segment j the
    // trend regressors are c + d t with c, d constant.
    Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd xty = Eigen::VectorXd::Zero(k);
    double yty = 0.0;
    double rows = 0.0;
    Eigen::VectorXd cv(k), dv(k);
    for (int j = 0; j < segs; ++j) {
      const int lo = j == 0 ? 0 : kinks[j - 1];
      const int hi = j + 1 < segs ? kinks[j] : end;  // rows lo+1..hi
      cv.setZero();
      dv.setZero();
      cv(0) = 1.0;
      for (int i = 0; i < j; ++i) cv(1 + i) = (i == 0 ? kinks[0] : kinks[i] - kinks[i - 1]);
      cv(1 + j) = -lo;
      dv(1 + j) = 1.0;
      const double n0 = range(pow_[0], lo, hi), n1 = range(pow_[1], lo, hi), n2 = range(pow_[2], lo, hi);
      rows += n0;
      xtx.noalias() += n0 * cv * cv.transpose() + n1 * (cv * dv.transpose() + dv * cv.transpose()) +
                       n2 * dv * dv.transpose();
      xty += cv * range(y_, lo, hi) + dv * range(ty_, lo, hi);
      yty += range(yy_, lo, hi);
    }
    if (rows <= k) return 0.0;
    const Eigen::VectorXd coef = xtx.colPivHouseholderQr().solve(xty);
    return std::max(0.0, yty - coef.dot(xty));
  }

 private:
  double& at(int a, int b) { return table_[static_cast<std::size_t>(a) * (values_.size() + 2) + b]; }
  double at(int a, int b) const { return table_[static_cast<std::size_t>(a) * (values_.size() + 2) + b]; }

  double segment_bound(int a, int b) const {
    const int len = b - a + 1;
    switch (spec_.errors) {
      case ErrorKind::independent: {
        // OLS line residual sum of squares
        double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
        for (int t = a; t <= b; ++t) {
          const double tc = t - 0.5 * (a + b);
          const double y = values_[t - 1];
          st += tc; sy += y; stt += tc * tc; sty += tc * y; syy += y * y;
        }
        const double ybar = sy / len;
        const double slope = sty / stt;
        return std::max(0.0, syy - len * ybar * ybar - slope * sty);
      }
      case ErrorKind::piecewise_ar1: {
        try {
          return -2.0 * fit_segment_ar1(values_, a, b).loglik;
        } catch (const DegenerateError&) {
          return -kInf;
        } catch (const ConvergenceError&) {
          return -kInf;
        }
      }
      case ErrorKind::global_ar: {
        const int p = spec_.ar_order;
        const int rows = len - p;
        const int cols = 2 + p;
        if (rows <= cols) return 0.0;
        Eigen::MatrixXd x(rows, cols);
        Eigen::VectorXd y(rows);
        const double center = 0.5 * (a + b);
        for (int r = 0; r < rows; ++r) {
          const int t = a + p + r;
          y(r) = values_[t - 1];
          x(r, 0) = 1.0;
          x(r, 1) = t - center;
          for (int j = 1; j <= p; ++j) x(r, 1 + j) = values_[t - 1 - j];
        }
        const Eigen::VectorXd coef = x.colPivHouseholderQr().solve(y);
        return (y - x * coef).squaredNorm();
      }
    }
    return -kInf;
  }

  // Cumulative sums over t = 1..n of t^q, y_t, t y_t and y_t^2.
  void build_moments() {
    const int n = static_cast<int>(values_.size());
    auto cumulate = [&](auto term) {
      std::vector<double> out(n + 1, 0.0);
      for (int t = 1; t <= n; ++t) out[t] = out[t - 1] + term(t);
      return out;
    };
    for (int q = 0; q < 3; ++q) pow_[q] = cumulate([q](int t) { return std::pow(static_cast<double>(t), q); });
    y_ = cumulate([&](int t) { return values_[t - 1]; });
    ty_ = cumulate([&](int t) { return t * values_[t - 1]; });
    yy_ = cumulate([&](int t) { return values_[t - 1] * values_[t - 1]; });
  }
  // Sum over rows a+1..b.
  static double range(const std::vector<double>& cum, int a, int b) { return cum[b] - cum[a]; }

  std::span<const double> values_;
  ModelSpec spec_;
  std::vector<double> table_;
  std::vector<double> pow_[3];
  std::vector<double> y_, ty_, yy_;
};

SearchResult make_result(std::size_t n, std::vector<int> taus, double objective, SearchStats stats) {
  return SearchResult{Segmentation(n, std::move(taus)), objective, stats};
}

}  // namespace

double evaluate_configuration(std::span<const double> values, const Segmentation& seg, const ModelSpec& spec,
                              SearchStats* stats) {
  if (stats) ++stats->fits;
  try {
    return fit_at(values, seg, spec).objective;
  } catch (const ConvergenceError&) {
  } catch (const DegenerateError&) {
  } catch (const DomainError&) {
  }
  if (stats) ++stats->failed_fits;
  return kInf;
}

SearchResult exhaustive_search(std::span<const double> values, const ModelSpec& spec) {
  spec.validate();
  const int n = static_cast<int>(values.size());
  SearchStats stats;
  double best = kInf;
  std::vector<int> best_taus;
  bool found = false;
  for (int m = 0; m <= spec.max_m; ++m) {
    for_each_configuration(n, m, spec.min_seg_len, [&](const std::vector<int>& taus) {
      const double obj = evaluate_configuration(values, Segmentation(n, taus), spec, &stats);
      if (obj < best) {
        best = obj;
        best_taus = taus;
        found = true;
      }
    });
  }
  if (!found) throw ConvergenceError("no configuration could be fitted");
  return make_result(values.size(), best_taus, best, stats);
}

SearchResult exact_dp_search(std::span<const double> values, const ModelSpec& spec, int max_m) {
  spec.validate();
  const int n = static_cast<int>(values.size());
  const int len = spec.min_seg_len;
  if (max_m < 0) throw DomainError("max_m must be nonnegative");
  if (n < len) throw DomainError("series shorter than min_seg_len");
  if (static_cast<long>(max_m) * len > n) {
    throw DomainError("infeasible search: max_m * min_seg_len exceeds the series length");
  }

  SegmentBounds bounds(values, spec);
  SearchStats stats;
  stats.segment_costs = bounds.evaluations();

  // suffix[r][s]: least summed bound covering s..n with r more changepoints.
  std::vector<std::vector<double>> suffix(max_m + 1, std::vector<double>(n + 2, kInf));
  for (int s = 1; s + len - 1 <= n; ++s) suffix[0][s] = bounds.segment(s, n);
  for (int r = 1; r <= max_m; ++r) {
    for (int s = 1; s <= n; ++s) {
      double best = kInf;
      for (int e = s + len - 1; n - e >= r * len; ++e) {
        const double tail = suffix[r - 1][e + 1];
        if (tail == kInf) continue;
        best = std::min(best, bounds.segment(s, e) + tail);
      }
      suffix[r][s] = best;
    }
  }

  double incumbent = kInf;
  std::vector<int> best_taus;
  bool found = false;
  std::vector<int> taus;

  for (int m = 0; m <= max_m; ++m) {
    const double pen = penalty_value(static_cast<std::size_t>(m), spec, values.size());
    if (suffix[m][1] == kInf) continue;
    taus.assign(m, 0);
    auto rec = [&](auto&& self, int depth, int prev, double acc) -> void {
      const int remaining = m - depth;
      const double lb = bounds.whole(acc + suffix[remaining][prev + 1]) + pen;
      if (lb == kInf || incumbent == -kInf) return;
      if (found && lb > incumbent + prune_slack(incumbent)) return;
      if (found && (depth >= 2 || (depth == m && m >= 1)) && bounds.has_prefix_bound()) {
        // Continuity over the placed part; at a leaf this covers the whole series.
        const bool leaf = depth == m;
        const std::span<const int> kinks(taus.data(), static_cast<std::size_t>(leaf ? depth : depth - 1));
        const double head = bounds.continuous_prefix(kinks, leaf ? n : prev);
        const double tail = leaf ? 0.0 : suffix[remaining][prev + 1];
        ++stats.segment_costs;
        if (bounds.whole(head + tail) + pen > incumbent + prune_slack(incumbent)) return;
      }
      if (depth == m) {
        const double obj = evaluate_configuration(values, Segmentation(values.size(), taus), spec, &stats);
        if (obj < incumbent) {
          incumbent = obj;
          best_taus = taus;
          found = true;
        }
        return;
      }
      for (int tau = prev + len; tau <= n - remaining * len; ++tau) {
        const double seg = bounds.segment(prev + 1, tau);
        if (seg == kInf) continue;
        taus[depth] = tau;
        self(self, depth + 1, tau, acc + seg);
      }
    };
    rec(rec, 0, 0, 0.0);
  }
  if (!found) throw ConvergenceError("no configuration could be fitted");
  return make_result(values.size(), best_taus, incumbent, stats);
}

SearchResult pelt_search(std::span<const double> values, const ModelSpec& spec) {
  spec.validate();
  if (!is_segment_additive(spec)) {
    throw DomainError("PELT needs a segment-additive cost (discontinuous trend, piecewise AR(1)); use exact_dp for " +
                      describe(spec));
  }
  const int n = static_cast<int>(values.size());
  const int len = spec.min_seg_len;
  if (n < len) throw DomainError("series shorter than min_seg_len");
  const double pen0 = penalty_value(0, spec, values.size());
  const double step = penalty_value(1, spec, values.size()) - pen0;
  // Exact AR(1) segment likelihoods are not strictly sub-additive (splitting
  // drops the conditioning at the cut), so pruning keeps one changepoint's
  // penalty as slack.
  const double prune_margin = step;

  SearchStats stats;
  auto cost = [&](int a, int b) {
    ++stats.segment_costs;
    try {
      return -2.0 * fit_segment_ar1(values, a, b).loglik;
    } catch (const DegenerateError&) {
    } catch (const ConvergenceError&) {
    }
    return kInf;
  };

  std::vector<double> best(n + 1, kInf);
  std::vector<int> last(n + 1, -1);
  best[0] = pen0 - step;
  std::vector<int> candidates{0};
  std::vector<double> totals;
  std::vector<double> seg_costs;
  for (int t = len; t <= n; ++t) {
    totals.assign(candidates.size(), kInf);
    seg_costs.assign(candidates.size(), kInf);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const int s = candidates[i];
      if (t - s < len) continue;
      seg_costs[i] = cost(s + 1, t);
      totals[i] = best[s] + seg_costs[i] + step;
      if (totals[i] < best[t]) {
        best[t] = totals[i];
        last[t] = s;
      }
    }
    std::vector<int> kept;
    kept.reserve(candidates.size() + 1);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const int s = candidates[i];
      const bool evaluated = t - s >= len;
      if (evaluated && best[s] + seg_costs[i] - prune_margin > best[t]) continue;
      kept.push_back(s);
    }
    if (best[t] < kInf && t + len <= n) kept.push_back(t);
    candidates = std::move(kept);
  }
  if (last[n] < 0) throw ConvergenceError("no admissible segmentation could be fitted");
  std::vector<int> taus;
  for (int t = n; last[t] > 0; t = last[t]) taus.push_back(last[t]);
  std::reverse(taus.begin(), taus.end());
  Segmentation seg(values.size(), taus);
  const double obj = evaluate_configuration(values, seg, spec, &stats);
  return SearchResult{seg, obj, stats};
}

SearchKind default_search(const ModelSpec& spec) {
  return is_segment_additive(spec) ? SearchKind::pelt : SearchKind::exact_dp;
}

Detection detect(std::span<const double> values, const ModelSpec& spec) {
  SearchResult result;
  switch (spec.search) {
    case SearchKind::pelt: result = pelt_search(values, spec); break;
    case SearchKind::exact_dp: result = exact_dp_search(values, spec, spec.max_m); break;
    case SearchKind::exhaustive: result = exhaustive_search(values, spec); break;
  }
  FitResult fit = fit_at(values, result.seg, spec);
  return Detection{std::move(result), std::move(fit)};
}

Detection detect(const AnnualSeries& series, const ModelSpec& spec) { return detect(series.values(), spec); }

std::size_t parameter_count(std::size_t m, const ModelSpec& spec) {
  const std::size_t segs = m + 1;
  const std::size_t regression = spec.trend == TrendKind::continuous ? m + 2 : 2 * segs;
  std::size_t error = 0;
  switch (spec.errors) {
    case ErrorKind::independent: error = 1; break;
    case ErrorKind::global_ar: error = static_cast<std::size_t>(spec.ar_order) + 1; break;
    case ErrorKind::piecewise_ar1: error = 2 * segs; break;
  }
  return m + regression + error;
}

double bic_penalty(std::size_t m, const ModelSpec& spec, std::size_t n) {
  if (n < 2) throw DomainError("BIC needs N >= 2");
  return static_cast<double>(parameter_count(m, spec)) * std::log(static_cast<double>(n));
}

double penalty_value(std::size_t m, const ModelSpec& spec, std::size_t n) {
  if (spec.penalty == PenaltyKind::manual) return static_cast<double>(parameter_count(m, spec)) * spec.penalty_weight;
  return bic_penalty(m, spec, n);
}

}  // namespace trendshift
