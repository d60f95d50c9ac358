#pragma once

#include <cstddef>
#include <memory>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "workgen/random.hpp"

namespace workgen {

enum class Family {
    exponential,
    gamma,
    weibull,
    pareto,
    log_normal,
    empirical,
    body_tail_mixture,
    two_component_mixture,
};

const char* family_name(Family f);
Family family_from_name(std::string_view name);

// One parameterized univariate distribution over positive reals. Only the
// fields relevant to `family` are meaningful; use the factories.
struct DistributionSpec {
    Family family = Family::exponential;

    double rate = 0.0;     // exponential: events per unit
    double shape = 0.0;    // gamma k, weibull shape
    double scale = 0.0;    // gamma theta, weibull scale
    double alpha = 0.0;    // pareto tail index
    double minimum = 0.0;  // pareto x_m
    double mu = 0.0;       // log-normal log-mean
    double sigma = 0.0;    // log-normal log-stdev

    std::vector<double> samples;  // empirical, sorted ascending

    // Mixtures: body/tail for body_tail_mixture, components otherwise.
    std::shared_ptr<const DistributionSpec> first;
    std::shared_ptr<const DistributionSpec> second;
    double split = 0.0;   // body-tail split point s
    double weight = 0.0;  // body (or first-component) weight w in [0, 1]

    static DistributionSpec exponential(double rate);
    static DistributionSpec gamma(double shape, double scale);
    static DistributionSpec weibull(double shape, double scale);
    static DistributionSpec pareto(double alpha, double minimum);
    static DistributionSpec log_normal(double mu, double sigma);
    static DistributionSpec empirical(std::vector<double> samples);
    static DistributionSpec body_tail(DistributionSpec body, DistributionSpec tail, double split,
                                      double weight);
    static DistributionSpec two_component(DistributionSpec a, DistributionSpec b, double weight);

    /// Throws ParamError when parameters violate the family's constraints.
    void validate() const;
};

double pdf(const DistributionSpec& spec, double x);
double cdf(const DistributionSpec& spec, double x);

/// Inverse CDF; u must lie in (0, 1). Mixtures without a closed form are
/// inverted numerically to ~1e-12.
double quantile(const DistributionSpec& spec, double u);

/// Analytic mean; +inf for Pareto with alpha <= 1.
double mean(const DistributionSpec& spec);

double sample_one(const DistributionSpec& spec, RandomStream& stream);
std::vector<double> sample(const DistributionSpec& spec, std::size_t n, RandomStream& stream);

nlohmann::json to_json(const DistributionSpec& spec);
DistributionSpec spec_from_json(const nlohmann::json& j);

}  // namespace workgen
