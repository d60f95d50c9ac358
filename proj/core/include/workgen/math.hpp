#pragma once

// Scalar special functions backing the distribution families. All routines
// are deterministic and thread-safe.

namespace workgen::math {

double digamma(double x);
double trigamma(double x);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Inverse of gamma_p in x for fixed a: returns x with P(a, x) = p.
double gamma_p_inverse(double a, double p);

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile, u in (0, 1).
double normal_quantile(double u);

/// Kolmogorov distribution survival function Q(x) = P(K > x).
double kolmogorov_sf(double x);

}  // namespace workgen::math
