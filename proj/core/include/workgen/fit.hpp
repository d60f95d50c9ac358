#pragma once

#include <cstddef>
#include <span>

#include "workgen/distribution.hpp"

namespace workgen {

struct FitResult {
    DistributionSpec spec;
    double log_likelihood = 0.0;
    std::size_t n_samples = 0;
};

/// Maximum-likelihood fit of one parametric family (Exponential, Gamma,
/// Weibull, Pareto, LogNormal). Gamma and Weibull shapes are found by
/// safeguarded Newton on the profile-likelihood equation to a relative
/// tolerance of 1e-8.
FitResult fit_mle(Family family, std::span<const double> samples);

/// Log-normal body below the empirical `tail_quantile`, Pareto tail above it;
/// the body weight is the sample fraction at or below the split.
DistributionSpec fit_body_tail(std::span<const double> samples, double tail_quantile = 0.95);

double log_likelihood(const DistributionSpec& spec, std::span<const double> samples);

}  // namespace workgen
