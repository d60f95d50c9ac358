#include "workgen/gof.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "workgen/error.hpp"
#include "workgen/math.hpp"

namespace workgen {

double ks_statistic(std::span<const double> sorted,
                    const std::function<double(double)>& model_cdf) {
    auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double f = model_cdf(sorted[i]);
        double lo = f - static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n - f;
        d = std::max(d, std::max(lo, hi));
    }
    return d;
}

KsResult ks_test(std::span<const double> samples, const DistributionSpec& spec) {
    if (samples.size() < 2) throw ParamError("ks_test: need at least 2 samples");
    spec.validate();
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    double d = ks_statistic(sorted, [&](double x) { return cdf(spec, x); });
    double n = static_cast<double>(sorted.size());
    return KsResult{d, math::kolmogorov_sf(std::sqrt(n) * d), sorted.size()};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw ParamError("ks_two_sample: need at least 2 samples each");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    double na = static_cast<double>(sa.size());
    double nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) ++i;
        while (j < sb.size() && sb[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    double n_eff = na * nb / (na + nb);
    return KsResult{d, math::kolmogorov_sf(std::sqrt(n_eff) * d),
                    static_cast<std::size_t>(std::lround(n_eff))};
}

double cv(std::span<const double> values) {
    if (values.size() < 2) throw ParamError("cv: need at least 2 values");
    double sum = 0.0;
    for (double v : values) sum += v;
    double mean = sum / static_cast<double>(values.size());
    if (!(mean > 0.0)) throw ParamError("cv: mean must be positive");
    double acc = 0.0;
    for (double v : values) {
        double d = v - mean;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(values.size())) / mean;
}

}  // namespace workgen
