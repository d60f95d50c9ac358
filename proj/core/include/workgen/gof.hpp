#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "workgen/distribution.hpp"

namespace workgen {

struct KsResult {
    double statistic = 0.0;  // D in [0, 1]
    double p_value = 1.0;
    std::size_t n = 0;       // effective sample count behind the p-value
};

/// Sup-distance between the empirical CDF of `sorted` and `model_cdf`,
/// checking both one-sided steps at every sample.
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& model_cdf);

/// One-sample KS test; p-value from the asymptotic Kolmogorov distribution at
/// sqrt(n) * D (no small-sample correction).
KsResult ks_test(std::span<const double> samples, const DistributionSpec& spec);

/// Two-sample KS test with effective n = n1*n2/(n1+n2).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Coefficient of variation: population standard deviation over mean.
double cv(std::span<const double> values);

}  // namespace workgen
