#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trendshift {

/// Raised for inputs outside an operation's domain (bad indices, invalid
/// parameters, rank-deficient designs, infeasible configurations).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Zero innovation variance: the data are fitted exactly and the Gaussian
/// likelihood is unbounded.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative estimation did not reach the tolerance, or the optimum sits on
/// the stationarity boundary.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A year-indexed annual anomaly series. Years are consecutive; time index t
/// runs 1..N with t=1 at start_year.
class AnnualSeries {
 public:
  AnnualSeries(int start_year, std::vector<double> values, std::string label = {},
               std::string baseline = {});

  int start_year() const { return start_year_; }
  int end_year() const { return start_year_ + static_cast<int>(values_.size()) - 1; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  const std::string& label() const { return label_; }
  const std::string& baseline() const { return baseline_; }

  /// Time index (1-based) of a calendar year.
  int index_of(int year) const;
  int year_of(int t) const { return start_year_ + t - 1; }

  /// Inclusive calendar-year window.
  AnnualSeries slice(int from_year, int to_year) const;

  bool operator==(const AnnualSeries& other) const {
    return start_year_ == other.start_year_ && values_ == other.values_;
  }

 private:
  int start_year_;
  std::vector<double> values_;
  std::string label_;
  std::string baseline_;
};

/// Ordered changepoint times tau_1 < ... < tau_m inside 1..N-1. A changepoint
/// at tau means the next regime starts at tau+1.
class Segmentation {
 public:
  Segmentation() = default;
  Segmentation(std::size_t n, std::vector<int> taus);

  std::size_t n() const { return n_; }
  std::size_t m() const { return taus_.size(); }
  std::size_t segment_count() const { return taus_.size() + 1; }
  const std::vector<int>& taus() const { return taus_; }

  /// tau_0 = 0 and tau_{m+1} = N, so segment i (1-based) covers
  /// boundary(i-1)+1 .. boundary(i).
  int boundary(std::size_t i) const;
  int segment_length(std::size_t i) const { return boundary(i) - boundary(i - 1); }
  int min_segment_length() const;

  bool operator==(const Segmentation&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<int> taus_;
};

/// Segment index r(t) in 1..m+1 for 1 <= t <= N.
std::size_t regime_index(int t, const Segmentation& seg);

enum class TrendKind { continuous, discontinuous };
enum class ErrorKind { independent, global_ar, piecewise_ar1 };
enum class PenaltyKind { bic, manual };
enum class SearchKind { pelt, exact_dp, exhaustive };

struct ModelSpec {
  TrendKind trend = TrendKind::continuous;
  ErrorKind errors = ErrorKind::piecewise_ar1;
  int ar_order = 1;  // used by global_ar only
  PenaltyKind penalty = PenaltyKind::bic;
  double penalty_weight = 0.0;  // per free parameter, manual penalty only
  int min_seg_len = 10;
  SearchKind search = SearchKind::exact_dp;
  int max_m = 5;

  /// Order of the fitted error autoregression (0 for independent errors).
  int error_order() const;
  void validate() const;
};

/// Segment costs are additive only when every parameter is local to a segment.
bool is_segment_additive(const ModelSpec& spec);

std::string to_string(TrendKind);
std::string to_string(ErrorKind);
std::string to_string(SearchKind);
std::string describe(const ModelSpec& spec);

struct FitResult {
  ModelSpec spec;
  Segmentation seg;
  std::vector<double> alphas;  // intercept per segment
  std::vector<double> betas;   // slope per segment
  std::vector<std::vector<double>> phis;  // one vector (global) or one per segment
  std::vector<double> sigmas;             // one (global) or one per segment
  double loglik = 0.0;
  double objective = 0.0;
  std::size_t parameter_count = 0;
  int iterations = 0;
  std::vector<double> fitted;      // E[X_t]
  std::vector<double> residuals;   // X_t - E[X_t]
  std::vector<double> innovations; // residuals with AR structure removed

  /// Largest |alpha_i + beta_i tau_i - alpha_{i+1} - beta_{i+1} tau_i|.
  double continuity_gap() const;
};

}  // namespace trendshift
