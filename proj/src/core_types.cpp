#include "trendshift/core_types.hpp"

#include <algorithm>
#include <cmath>

namespace trendshift {

AnnualSeries::AnnualSeries(int start_year, std::vector<double> values, std::string label,
                           std::string baseline)
    : start_year_(start_year),
      values_(std::move(values)),
      label_(std::move(label)),
      baseline_(std::move(baseline)) {
  if (values_.size() < 2) {
    throw DomainError("annual series needs at least 2 values");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("annual series contains a non-finite value");
  }
}

int AnnualSeries::index_of(int year) const {
  if (year < start_year_ || year > end_year()) {
    throw DomainError("year " + std::to_string(year) + " outside series " +
                      std::to_string(start_year_) + "-" + std::to_string(end_year()));
  }
  return year - start_year_ + 1;
}

AnnualSeries AnnualSeries::slice(int from_year, int to_year) const {
  from_year = std::max(from_year, start_year_);
  to_year = std::min(to_year, end_year());
  if (to_year < from_year) throw DomainError("empty year window");
  auto first = values_.begin() + (from_year - start_year_);
  auto last = values_.begin() + (to_year - start_year_ + 1);
  return AnnualSeries(from_year, std::vector<double>(first, last), label_, baseline_);
}

Segmentation::Segmentation(std::size_t n, std::vector<int> taus) : n_(n), taus_(std::move(taus)) {
  int prev = 0;
  for (int tau : taus_) {
    if (tau <= prev || tau >= static_cast<int>(n_)) {
      throw DomainError("changepoints must be strictly increasing within 1..N-1");
    }
    prev = tau;
  }
}

int Segmentation::boundary(std::size_t i) const {
  if (i == 0) return 0;
  if (i > taus_.size()) return static_cast<int>(n_);
  return taus_[i - 1];
}

int Segmentation::min_segment_length() const {
  int shortest = static_cast<int>(n_);
  for (std::size_t i = 1; i <= segment_count(); ++i) shortest = std::min(shortest, segment_length(i));
  return shortest;
}

std::size_t regime_index(int t, const Segmentation& seg) {
  if (t < 1 || t > static_cast<int>(seg.n())) {
    throw DomainError("time index " + std::to_string(t) + " outside 1.." + std::to_string(seg.n()));
  }
  const auto& taus = seg.taus();
  // number of changepoints strictly before t
  return static_cast<std::size_t>(std::lower_bound(taus.begin(), taus.end(), t) - taus.begin()) + 1;
}

int ModelSpec::error_order() const {
  switch (errors) {
    case ErrorKind::independent: return 0;
    case ErrorKind::global_ar: return ar_order;
    case ErrorKind::piecewise_ar1: return 1;
  }
  return 0;
}

void ModelSpec::validate() const {
  if (errors == ErrorKind::global_ar && ar_order < 1) throw DomainError("global AR order must be >= 1");
  if (min_seg_len < 2) throw DomainError("min_seg_len must be >= 2");
  if (errors != ErrorKind::independent && min_seg_len < error_order() + 2) {
    throw DomainError("min_seg_len too short for the error model");
  }
  if (penalty == PenaltyKind::manual && !(penalty_weight >= 0.0)) {
    throw DomainError("manual penalty weight must be nonnegative");
  }
  if (max_m < 0) throw DomainError("max_m must be nonnegative");
}

bool is_segment_additive(const ModelSpec& spec) {
  return spec.trend == TrendKind::discontinuous && spec.errors == ErrorKind::piecewise_ar1;
}

std::string to_string(TrendKind t) { return t == TrendKind::continuous ? "continuous" : "discontinuous"; }

std::string to_string(ErrorKind e) {
  switch (e) {
    case ErrorKind::independent: return "independent";
    case ErrorKind::global_ar: return "global-ar";
    case ErrorKind::piecewise_ar1: return "piecewise-ar1";
  }
  return "?";
}

std::string to_string(SearchKind s) {
  switch (s) {
    case SearchKind::pelt: return "pelt";
    case SearchKind::exact_dp: return "exact-dp";
    case SearchKind::exhaustive: return "exhaustive";
  }
  return "?";
}

std::string describe(const ModelSpec& spec) {
  std::string errors = to_string(spec.errors);
  if (spec.errors == ErrorKind::global_ar) errors = "global-ar" + std::to_string(spec.ar_order);
  return to_string(spec.trend) + "/" + errors;
}

double FitResult::continuity_gap() const {
  double gap = 0.0;
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    const double tau = seg.boundary(i);
    gap = std::max(gap, std::abs(alphas[i - 1] + betas[i - 1] * tau - alphas[i] - betas[i] * tau));
  }
  return gap;
}

}  // namespace trendshift
