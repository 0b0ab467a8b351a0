#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "trendshift/core_types.hpp"
#include "trendshift/penalty.hpp"
#include "trendshift/trend_fit.hpp"

namespace trendshift {

struct SearchStats {
  std::size_t fits = 0;          // full fit_at evaluations
  std::size_t segment_costs = 0; // segment cost / bound evaluations
  std::size_t failed_fits = 0;   // configurations skipped as infeasible
};

struct SearchResult {
  Segmentation seg;
  double objective = 0.0;
  SearchStats stats;
};

/// Penalized objective of one configuration, or +inf when its fit fails to
/// converge or is degenerate. Every search scores leaves through this function.
double evaluate_configuration(std::span<const double> values, const Segmentation& seg, const ModelSpec& spec,
                              SearchStats* stats = nullptr);

/// Every admissible configuration with m <= spec.max_m.
SearchResult exhaustive_search(std::span<const double> values, const ModelSpec& spec);

/// Exact minimizer over m <= max_m by depth-first enumeration in lexicographic
/// order, pruned with additive lower bounds on -2 ln L:
///   independent errors: per-segment OLS residual sums of squares;
///   piecewise AR(1): per-segment exact discontinuous AR(1) likelihoods;
///   global AR(p): per-segment least squares on (1, t, lags) over points
///   whose lags stay inside the segment, with a shared innovation variance.
/// Each bound is a relaxation of the corresponding model, so pruning never
/// discards the optimum.
SearchResult exact_dp_search(std::span<const double> values, const ModelSpec& spec, int max_m);

/// Pruned exact linear-time search for segment-additive costs
/// (discontinuous trend with piecewise AR(1) errors only).
SearchResult pelt_search(std::span<const double> values, const ModelSpec& spec);

struct Detection {
  SearchResult search;
  FitResult fit;
};

/// Runs the search named by spec.search and refits the winner.
Detection detect(std::span<const double> values, const ModelSpec& spec);
Detection detect(const AnnualSeries& series, const ModelSpec& spec);

/// pelt for additive specs, exact_dp otherwise.
SearchKind default_search(const ModelSpec& spec);

/// Calls visit(taus) for each admissible changepoint vector with exactly m
/// changepoints, in lexicographic order.
template <class Visit>
void for_each_configuration(int n, int m, int min_len, Visit&& visit) {
  std::vector<int> taus(m);
  auto rec = [&](auto&& self, int depth, int prev) -> void {
    if (depth == m) {
      if (n - prev >= min_len) visit(static_cast<const std::vector<int>&>(taus));
      return;
    }
    const int remaining = m - depth;  // segments still to place after this changepoint
    for (int tau = prev + min_len; tau <= n - remaining * min_len; ++tau) {
      taus[depth] = tau;
      self(self, depth + 1, tau);
    }
  };
  rec(rec, 0, 0);
}

}  // namespace trendshift
