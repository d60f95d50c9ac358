#include "workgen/fit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "workgen/error.hpp"
#include "workgen/math.hpp"

namespace workgen {
namespace {

struct Moments {
    double mean = 0.0;
    double mean_log = 0.0;
    double var_log = 0.0;  // population variance of log samples
    double min = 0.0;
    std::size_t n = 0;
};

Moments moments(std::span<const double> xs) {
    Moments m;
    m.n = xs.size();
    m.min = xs[0];
    double sum = 0.0, sum_log = 0.0;
    for (double x : xs) {
        if (!(x > 0.0) || !std::isfinite(x)) throw ParamError("fit: samples must be positive finite");
        sum += x;
        sum_log += std::log(x);
        m.min = std::min(m.min, x);
    }
    m.mean = sum / static_cast<double>(m.n);
    m.mean_log = sum_log / static_cast<double>(m.n);
    double acc = 0.0;
    for (double x : xs) {
        double d = std::log(x) - m.mean_log;
        acc += d * d;
    }
    m.var_log = acc / static_cast<double>(m.n);
    return m;
}

// Solve ln k - psi(k) = s for the Gamma shape. The left side is strictly
// decreasing from +inf to 0, so the root is unique for s > 0.
double gamma_shape_from(double s) {
    double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    if (!(k > 0.0) || !std::isfinite(k)) k = 0.5;
    double lo = 1e-9, hi = 1e9;
    for (int i = 0; i < 200; ++i) {
        double f = std::log(k) - math::digamma(k) - s;
        if (f > 0.0) {
            lo = k;
        } else {
            hi = k;
        }
        double deriv = 1.0 / k - math::trigamma(k);
        double next = k - f / deriv;
        if (!(next > lo) || !(next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::fabs(next - k) <= 1e-8 * k) return next;
        k = next;
    }
    return k;
}

// Weibull profile equation in the shape c:
//   g(c) = sum(x^c ln x)/sum(x^c) - 1/c - mean(ln x) = 0
// evaluated in log space to avoid overflow.
double weibull_shape_mle(std::span<const double> xs, const Moments& m) {
    double max_log = std::log(m.min);
    for (double x : xs) max_log = std::max(max_log, std::log(x));

    auto profile = [&](double c, double& deriv) {
        double sw = 0.0, swl = 0.0, swl2 = 0.0;
        for (double x : xs) {
            double lx = std::log(x);
            double w = std::exp(c * (lx - max_log));
            sw += w;
            swl += w * lx;
            swl2 += w * lx * lx;
        }
        double r = swl / sw;
        deriv = (swl2 / sw - r * r) + 1.0 / (c * c);
        return r - 1.0 / c - m.mean_log;
    };

    // Log-moment start: var(ln X) = pi^2 / (6 c^2).
    double c = 3.141592653589793 / std::sqrt(6.0 * m.var_log);
    if (!(c > 0.0) || !std::isfinite(c)) c = 1.0;
    double lo = 1e-3, hi = 1e4;
    for (int i = 0; i < 200; ++i) {
        double deriv;
        double g = profile(c, deriv);
        if (g > 0.0) {
            hi = c;  // g is increasing in c
        } else {
            lo = c;
        }
        double next = c - g / deriv;
        if (!(next > lo) || !(next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::fabs(next - c) <= 1e-8 * c) return next;
        c = next;
    }
    return c;
}

double log_pdf(const DistributionSpec& spec, double x) {
    switch (spec.family) {
        case Family::exponential:
            return std::log(spec.rate) - spec.rate * x;
        case Family::gamma:
            return (spec.shape - 1.0) * std::log(x / spec.scale) - x / spec.scale -
                   std::lgamma(spec.shape) - std::log(spec.scale);
        case Family::weibull: {
            double t = x / spec.scale;
            return std::log(spec.shape / spec.scale) + (spec.shape - 1.0) * std::log(t) -
                   std::pow(t, spec.shape);
        }
        case Family::pareto:
            return std::log(spec.alpha) + spec.alpha * std::log(spec.minimum) -
                   (spec.alpha + 1.0) * std::log(x);
        case Family::log_normal: {
            double z = (std::log(x) - spec.mu) / spec.sigma;
            return -0.5 * z * z - std::log(x * spec.sigma) - 0.9189385332046727;
        }
        default:
            return std::log(pdf(spec, x));
    }
}

}  // namespace

FitResult fit_mle(Family family, std::span<const double> samples) {
    if (samples.size() < 2) throw ParamError("fit_mle: need at least 2 samples");
    Moments m = moments(samples);
    bool constant = m.var_log == 0.0;

    DistributionSpec spec;
    switch (family) {
        case Family::exponential:
            spec = DistributionSpec::exponential(1.0 / m.mean);
            break;
        case Family::gamma: {
            double s = std::log(m.mean) - m.mean_log;
            if (constant || s <= 0.0)
                throw DegenerateDataError("fit_mle: Gamma requires positive sample variance");
            double k = gamma_shape_from(s);
            spec = DistributionSpec::gamma(k, m.mean / k);
            break;
        }
        case Family::weibull: {
            if (constant)
                throw DegenerateDataError("fit_mle: Weibull requires positive sample variance");
            double c = weibull_shape_mle(samples, m);
            double sw = 0.0;
            for (double x : samples) sw += std::pow(x, c);
            double scale = std::pow(sw / static_cast<double>(samples.size()), 1.0 / c);
            spec = DistributionSpec::weibull(c, scale);
            break;
        }
        case Family::pareto: {
            double acc = 0.0;
            for (double x : samples) acc += std::log(x / m.min);
            if (acc <= 0.0)
                throw DegenerateDataError("fit_mle: Pareto requires samples above the minimum");
            spec = DistributionSpec::pareto(static_cast<double>(samples.size()) / acc, m.min);
            break;
        }
        case Family::log_normal: {
            if (constant)
                throw DegenerateDataError("fit_mle: LogNormal requires positive sample variance");
            spec = DistributionSpec::log_normal(m.mean_log, std::sqrt(m.var_log));
            break;
        }
        default:
            throw ParamError("fit_mle: family has no parametric MLE");
    }
    return FitResult{spec, log_likelihood(spec, samples), samples.size()};
}

DistributionSpec fit_body_tail(std::span<const double> samples, double tail_quantile) {
    if (samples.size() < 100) throw ParamError("fit_body_tail: need at least 100 samples");
    if (!(tail_quantile > 0.0 && tail_quantile < 1.0))
        throw ParamError("fit_body_tail: tail_quantile must be in (0, 1)");

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    auto n = sorted.size();
    auto split_idx = static_cast<std::size_t>(
        std::ceil(tail_quantile * static_cast<double>(n)));
    if (split_idx > 0) split_idx -= 1;
    double split = sorted[split_idx];

    auto tail_begin = std::upper_bound(sorted.begin(), sorted.end(), split);
    std::span<const double> body(sorted.data(), static_cast<std::size_t>(tail_begin - sorted.begin()));
    std::span<const double> tail(&*tail_begin, sorted.size() - body.size());
    if (tail.size() < 10) throw InsufficientTailError("fit_body_tail: fewer than 10 tail samples");

    double w = static_cast<double>(body.size()) / static_cast<double>(n);
    FitResult body_fit = fit_mle(Family::log_normal, body);

    // Hill estimator with the minimum pinned at the split.
    double acc = 0.0;
    for (double x : tail) acc += std::log(x / split);
    if (acc <= 0.0) throw InsufficientTailError("fit_body_tail: tail has no spread above split");
    double alpha = static_cast<double>(tail.size()) / acc;

    return DistributionSpec::body_tail(body_fit.spec, DistributionSpec::pareto(alpha, split), split,
                                       w);
}

double log_likelihood(const DistributionSpec& spec, std::span<const double> samples) {
    double acc = 0.0;
    for (double x : samples) acc += log_pdf(spec, x);
    return acc;
}

}  // namespace workgen
