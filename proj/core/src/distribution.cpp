#include "workgen/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "workgen/error.hpp"
#include "workgen/math.hpp"

namespace workgen {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* message) {
    if (!ok) throw ParamError(message);
}

// Truncated-body CDF: mass of `body` renormalized to [0, s].
double body_trunc_cdf(const DistributionSpec& body, double split, double x) {
    double denom = cdf(body, split);
    if (denom <= 0.0) return x >= split ? 1.0 : 0.0;
    if (x >= split) return 1.0;
    return cdf(body, x) / denom;
}

double body_trunc_pdf(const DistributionSpec& body, double split, double x) {
    double denom = cdf(body, split);
    if (denom <= 0.0 || x > split) return 0.0;
    return pdf(body, x) / denom;
}

// Numeric inverse for mixtures: the mixture quantile lies between the
// component quantiles, which gives a bracket for bisection + Newton.
double mixture_quantile(const DistributionSpec& spec, double u) {
    double qa = quantile(*spec.first, u);
    double qb = quantile(*spec.second, u);
    double lo = std::min(qa, qb);
    double hi = std::max(qa, qb);
    if (hi - lo <= 1e-15 * (std::fabs(hi) + 1.0)) return lo;
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        double f = cdf(spec, x) - u;
        if (f > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        double dens = pdf(spec, x);
        double next = dens > 0.0 ? x - f / dens : 0.5 * (lo + hi);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - x) <= 1e-12 * (std::fabs(x) + 1e-300)) return next;
        x = next;
    }
    return x;
}

// Marsaglia-Tsang gamma draw (shape boosted below 1); faster than quantile
// inversion and still fully determined by the stream.
double gamma_draw(double shape, double scale, RandomStream& stream) {
    if (shape < 1.0) {
        double u = stream.next_uniform();
        return gamma_draw(shape + 1.0, scale, stream) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z = stream.next_normal();
        double v = 1.0 + c * z;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = stream.next_uniform();
        if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v * scale;
    }
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::exponential: return "Exponential";
        case Family::gamma: return "Gamma";
        case Family::weibull: return "Weibull";
        case Family::pareto: return "Pareto";
        case Family::log_normal: return "LogNormal";
        case Family::empirical: return "Empirical";
        case Family::body_tail_mixture: return "BodyTailMixture";
        case Family::two_component_mixture: return "TwoComponentMixture";
    }
    return "?";
}

Family family_from_name(std::string_view name) {
    if (name == "Exponential") return Family::exponential;
    if (name == "Gamma") return Family::gamma;
    if (name == "Weibull") return Family::weibull;
    if (name == "Pareto") return Family::pareto;
    if (name == "LogNormal") return Family::log_normal;
    if (name == "Empirical") return Family::empirical;
    if (name == "BodyTailMixture") return Family::body_tail_mixture;
    if (name == "TwoComponentMixture") return Family::two_component_mixture;
    throw ParamError("unknown distribution family: " + std::string(name));
}

DistributionSpec DistributionSpec::exponential(double rate) {
    DistributionSpec s;
    s.family = Family::exponential;
    s.rate = rate;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::gamma(double shape, double scale) {
    DistributionSpec s;
    s.family = Family::gamma;
    s.shape = shape;
    s.scale = scale;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::weibull(double shape, double scale) {
    DistributionSpec s;
    s.family = Family::weibull;
    s.shape = shape;
    s.scale = scale;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::pareto(double alpha, double minimum) {
    DistributionSpec s;
    s.family = Family::pareto;
    s.alpha = alpha;
    s.minimum = minimum;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::log_normal(double mu, double sigma) {
    DistributionSpec s;
    s.family = Family::log_normal;
    s.mu = mu;
    s.sigma = sigma;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::empirical(std::vector<double> samples) {
    DistributionSpec s;
    s.family = Family::empirical;
    std::sort(samples.begin(), samples.end());
    s.samples = std::move(samples);
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::body_tail(DistributionSpec body, DistributionSpec tail,
                                             double split, double weight) {
    DistributionSpec s;
    s.family = Family::body_tail_mixture;
    s.first = std::make_shared<DistributionSpec>(std::move(body));
    s.second = std::make_shared<DistributionSpec>(std::move(tail));
    s.split = split;
    s.weight = weight;
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::two_component(DistributionSpec a, DistributionSpec b,
                                                 double weight) {
    DistributionSpec s;
    s.family = Family::two_component_mixture;
    s.first = std::make_shared<DistributionSpec>(std::move(a));
    s.second = std::make_shared<DistributionSpec>(std::move(b));
    s.weight = weight;
    s.validate();
    return s;
}

void DistributionSpec::validate() const {
    switch (family) {
        case Family::exponential:
            require(rate > 0.0 && std::isfinite(rate), "Exponential: rate must be positive");
            break;
        case Family::gamma:
        case Family::weibull:
            require(shape > 0.0 && std::isfinite(shape), "shape must be positive");
            require(scale > 0.0 && std::isfinite(scale), "scale must be positive");
            break;
        case Family::pareto:
            require(alpha > 0.0 && std::isfinite(alpha), "Pareto: alpha must be positive");
            require(minimum > 0.0 && std::isfinite(minimum), "Pareto: minimum must be positive");
            break;
        case Family::log_normal:
            require(std::isfinite(mu), "LogNormal: mu must be finite");
            require(sigma > 0.0 && std::isfinite(sigma), "LogNormal: sigma must be positive");
            break;
        case Family::empirical:
            require(!samples.empty(), "Empirical: sample list must be non-empty");
            require(std::is_sorted(samples.begin(), samples.end()),
                    "Empirical: samples must be sorted ascending");
            break;
        case Family::body_tail_mixture:
            require(first && second, "BodyTailMixture: body and tail required");
            require(split > 0.0 && std::isfinite(split), "BodyTailMixture: split must be positive");
            require(weight >= 0.0 && weight <= 1.0, "BodyTailMixture: weight must be in [0, 1]");
            first->validate();
            second->validate();
            require(second->family != Family::pareto || second->minimum >= split * (1.0 - 1e-12),
                    "BodyTailMixture: tail must carry no mass below the split");
            break;
        case Family::two_component_mixture:
            require(first && second, "TwoComponentMixture: two components required");
            require(weight >= 0.0 && weight <= 1.0, "TwoComponentMixture: weight must be in [0, 1]");
            first->validate();
            second->validate();
            break;
    }
}

double pdf(const DistributionSpec& spec, double x) {
    if (!std::isfinite(x)) return 0.0;
    switch (spec.family) {
        case Family::exponential:
            return x < 0.0 ? 0.0 : spec.rate * std::exp(-spec.rate * x);
        case Family::gamma: {
            if (x <= 0.0) return 0.0;
            double logp = (spec.shape - 1.0) * std::log(x / spec.scale) - x / spec.scale -
                          std::lgamma(spec.shape) - std::log(spec.scale);
            return std::exp(logp);
        }
        case Family::weibull: {
            if (x <= 0.0) return 0.0;
            double t = x / spec.scale;
            return spec.shape / spec.scale * std::pow(t, spec.shape - 1.0) *
                   std::exp(-std::pow(t, spec.shape));
        }
        case Family::pareto:
            if (x < spec.minimum) return 0.0;
            return spec.alpha * std::pow(spec.minimum, spec.alpha) / std::pow(x, spec.alpha + 1.0);
        case Family::log_normal: {
            if (x <= 0.0) return 0.0;
            double z = (std::log(x) - spec.mu) / spec.sigma;
            return std::exp(-0.5 * z * z) / (x * spec.sigma * 2.5066282746310002);
        }
        case Family::empirical:
            return 0.0;  // atomic; no density
        case Family::body_tail_mixture: {
            double body = x <= spec.split ? body_trunc_pdf(*spec.first, spec.split, x) : 0.0;
            double tail = x > spec.split ? pdf(*spec.second, x) : 0.0;
            return spec.weight * body + (1.0 - spec.weight) * tail;
        }
        case Family::two_component_mixture:
            return spec.weight * pdf(*spec.first, x) + (1.0 - spec.weight) * pdf(*spec.second, x);
    }
    return 0.0;
}

double cdf(const DistributionSpec& spec, double x) {
    if (std::isnan(x)) return 0.0;
    switch (spec.family) {
        case Family::exponential:
            return x <= 0.0 ? 0.0 : 1.0 - std::exp(-spec.rate * x);
        case Family::gamma:
            return x <= 0.0 ? 0.0 : math::gamma_p(spec.shape, x / spec.scale);
        case Family::weibull:
            return x <= 0.0 ? 0.0 : 1.0 - std::exp(-std::pow(x / spec.scale, spec.shape));
        case Family::pareto:
            return x < spec.minimum ? 0.0 : 1.0 - std::pow(spec.minimum / x, spec.alpha);
        case Family::log_normal:
            return x <= 0.0 ? 0.0 : math::normal_cdf((std::log(x) - spec.mu) / spec.sigma);
        case Family::empirical: {
            auto it = std::upper_bound(spec.samples.begin(), spec.samples.end(), x);
            return static_cast<double>(it - spec.samples.begin()) /
                   static_cast<double>(spec.samples.size());
        }
        case Family::body_tail_mixture: {
            if (x <= spec.split) return spec.weight * body_trunc_cdf(*spec.first, spec.split, x);
            return spec.weight + (1.0 - spec.weight) * cdf(*spec.second, x);
        }
        case Family::two_component_mixture:
            return spec.weight * cdf(*spec.first, x) + (1.0 - spec.weight) * cdf(*spec.second, x);
    }
    return 0.0;
}

double quantile(const DistributionSpec& spec, double u) {
    if (!(u > 0.0 && u < 1.0)) throw ParamError("quantile: u must be in (0, 1)");
    switch (spec.family) {
        case Family::exponential:
            return -std::log1p(-u) / spec.rate;
        case Family::gamma:
            return spec.scale * math::gamma_p_inverse(spec.shape, u);
        case Family::weibull:
            return spec.scale * std::pow(-std::log1p(-u), 1.0 / spec.shape);
        case Family::pareto:
            return spec.minimum * std::pow(1.0 - u, -1.0 / spec.alpha);
        case Family::log_normal:
            return std::exp(spec.mu + spec.sigma * math::normal_quantile(u));
        case Family::empirical: {
            auto n = spec.samples.size();
            auto idx = static_cast<std::size_t>(u * static_cast<double>(n));
            if (idx >= n) idx = n - 1;
            return spec.samples[idx];
        }
        case Family::body_tail_mixture: {
            double w = spec.weight;
            if (u <= w && w > 0.0) {
                double denom = cdf(*spec.first, spec.split);
                double v = u / w * denom;
                if (v <= 0.0) v = std::numeric_limits<double>::min();
                if (v >= 1.0) return spec.split;
                double x = quantile(*spec.first, v);
                return std::min(x, spec.split);
            }
            double v = (u - w) / (1.0 - w);
            if (v <= 0.0) v = std::numeric_limits<double>::min();
            return quantile(*spec.second, v);
        }
        case Family::two_component_mixture: {
            if (spec.weight >= 1.0) return quantile(*spec.first, u);
            if (spec.weight <= 0.0) return quantile(*spec.second, u);
            return mixture_quantile(spec, u);
        }
    }
    throw ParamError("quantile: unsupported family");
}

double mean(const DistributionSpec& spec) {
    switch (spec.family) {
        case Family::exponential:
            return 1.0 / spec.rate;
        case Family::gamma:
            return spec.shape * spec.scale;
        case Family::weibull:
            return spec.scale * std::exp(std::lgamma(1.0 + 1.0 / spec.shape));
        case Family::pareto:
            if (spec.alpha <= 1.0) return kInf;
            return spec.alpha * spec.minimum / (spec.alpha - 1.0);
        case Family::log_normal:
            return std::exp(spec.mu + 0.5 * spec.sigma * spec.sigma);
        case Family::empirical: {
            double sum = 0.0;
            for (double v : spec.samples) sum += v;
            return sum / static_cast<double>(spec.samples.size());
        }
        case Family::body_tail_mixture: {
            double body_mean;
            const DistributionSpec& body = *spec.first;
            if (body.family == Family::log_normal) {
                // Mean of a log-normal truncated to [0, s].
                double denom = math::normal_cdf((std::log(spec.split) - body.mu) / body.sigma);
                double num = math::normal_cdf(
                    (std::log(spec.split) - body.mu - body.sigma * body.sigma) / body.sigma);
                body_mean = denom > 0.0
                                ? std::exp(body.mu + 0.5 * body.sigma * body.sigma) * num / denom
                                : spec.split;
            } else {
                // Generic truncated mean by quantile-space quadrature.
                double denom = cdf(body, spec.split);
                if (denom <= 0.0) {
                    body_mean = spec.split;
                } else {
                    double acc = 0.0;
                    const int n = 512;
                    for (int i = 0; i < n; ++i) {
                        double u = (i + 0.5) / n * denom;
                        acc += quantile(body, u);
                    }
                    body_mean = acc / n;
                }
            }
            return spec.weight * body_mean + (1.0 - spec.weight) * mean(*spec.second);
        }
        case Family::two_component_mixture:
            return spec.weight * mean(*spec.first) + (1.0 - spec.weight) * mean(*spec.second);
    }
    return 0.0;
}

double sample_one(const DistributionSpec& spec, RandomStream& stream) {
    if (spec.family == Family::gamma) return gamma_draw(spec.shape, spec.scale, stream);
    return quantile(spec, stream.next_uniform());
}

std::vector<double> sample(const DistributionSpec& spec, std::size_t n, RandomStream& stream) {
    spec.validate();
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample_one(spec, stream));
    return out;
}

nlohmann::json to_json(const DistributionSpec& spec) {
    nlohmann::json params;
    switch (spec.family) {
        case Family::exponential:
            params["rate"] = spec.rate;
            break;
        case Family::gamma:
        case Family::weibull:
            params["shape"] = spec.shape;
            params["scale"] = spec.scale;
            break;
        case Family::pareto:
            params["alpha"] = spec.alpha;
            params["min"] = spec.minimum;
            break;
        case Family::log_normal:
            params["mu"] = spec.mu;
            params["sigma"] = spec.sigma;
            break;
        case Family::empirical:
            params["samples"] = spec.samples;
            break;
        case Family::body_tail_mixture:
            params["body"] = to_json(*spec.first);
            params["tail"] = to_json(*spec.second);
            params["split"] = spec.split;
            params["weight"] = spec.weight;
            break;
        case Family::two_component_mixture:
            params["first"] = to_json(*spec.first);
            params["second"] = to_json(*spec.second);
            params["weight"] = spec.weight;
            break;
    }
    return nlohmann::json{{"family", family_name(spec.family)}, {"params", params}};
}

DistributionSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family")) {
        throw ParamError("distribution spec: expected object with 'family'");
    }
    Family fam = family_from_name(j.at("family").get<std::string>());
    const nlohmann::json& p = j.value("params", nlohmann::json::object());
    switch (fam) {
        case Family::exponential:
            return DistributionSpec::exponential(p.at("rate").get<double>());
        case Family::gamma:
            return DistributionSpec::gamma(p.at("shape").get<double>(), p.at("scale").get<double>());
        case Family::weibull:
            return DistributionSpec::weibull(p.at("shape").get<double>(),
                                             p.at("scale").get<double>());
        case Family::pareto:
            return DistributionSpec::pareto(p.at("alpha").get<double>(), p.at("min").get<double>());
        case Family::log_normal:
            return DistributionSpec::log_normal(p.at("mu").get<double>(),
                                                p.at("sigma").get<double>());
        case Family::empirical:
            return DistributionSpec::empirical(p.at("samples").get<std::vector<double>>());
        case Family::body_tail_mixture:
            return DistributionSpec::body_tail(spec_from_json(p.at("body")),
                                               spec_from_json(p.at("tail")),
                                               p.at("split").get<double>(),
                                               p.at("weight").get<double>());
        case Family::two_component_mixture:
            return DistributionSpec::two_component(spec_from_json(p.at("first")),
                                                   spec_from_json(p.at("second")),
                                                   p.at("weight").get<double>());
    }
    throw ParamError("distribution spec: unsupported family");
}

}  // namespace workgen
