#pragma once

#include <cstddef>

#include "trendshift/core_types.hpp"

namespace trendshift {

/// Free parameters of a model with m changepoints: the changepoint times,
/// regression coefficients, AR coefficients and innovation variances.
///
///   continuous / global AR(p)      2m + 3 + p   (p = 1: 2m + 4)
///   discontinuous / global AR(p)   3m + 3 + p   (p = 1: 3m + 4)
///   continuous / piecewise AR(1)   4m + 4
///   discontinuous / piecewise AR(1) 5m + 4
///
/// Independent errors count as global AR(0).
std::size_t parameter_count(std::size_t m, const ModelSpec& spec);

/// BIC: parameter_count * ln(N). Manual: parameter_count * weight.
double penalty_value(std::size_t m, const ModelSpec& spec, std::size_t n);

/// BIC penalty regardless of the spec's penalty kind.
double bic_penalty(std::size_t m, const ModelSpec& spec, std::size_t n);

}  // namespace trendshift
