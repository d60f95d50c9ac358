#include "workgen/arrival.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "workgen/error.hpp"
#include "workgen/gof.hpp"

namespace workgen {
namespace {

constexpr double kLinearStep = 60.0;  // discretization of linear profiles
constexpr double kTieStep = 1e-6;

struct Segment {
    double t0, t1, rate;
};

double weibull_cv(double shape) {
    double g1 = std::lgamma(1.0 + 1.0 / shape);
    double g2 = std::lgamma(1.0 + 2.0 / shape);
    return std::sqrt(std::exp(g2 - 2.0 * g1) - 1.0);
}

// Flatten the profile into constant-rate segments covering [0, horizon).
std::vector<Segment> segments_over(const RateProfile& p, double horizon) {
    std::vector<Segment> segs;
    if (p.interpolation == RateProfile::Interpolation::piecewise_linear) {
        for (double t = 0.0; t < horizon; t += kLinearStep) {
            double t1 = std::min(t + kLinearStep, horizon);
            segs.push_back({t, t1, p.rate_at(0.5 * (t + t1))});
        }
        return segs;
    }
    double t = 0.0;
    while (t < horizon) {
        double local = p.period > 0.0 ? std::fmod(t, p.period) : t;
        double base = t - local;
        // Find the breakpoint interval containing `local`.
        std::size_t i = 0;
        while (i + 1 < p.breakpoints.size() && p.breakpoints[i + 1].t <= local) ++i;
        double end;
        if (i + 1 < p.breakpoints.size()) {
            end = base + p.breakpoints[i + 1].t;
        } else {
            end = p.period > 0.0 ? base + p.period : horizon;
        }
        end = std::min(end, horizon);
        if (end <= t) end = horizon;  // guard against zero-length steps
        segs.push_back({t, end, p.breakpoints[i].rate});
        t = end;
    }
    return segs;
}

void enforce_strictly_increasing(std::vector<double>& ts, double horizon) {
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (ts[i] <= ts[i - 1]) ts[i] = ts[i - 1] + kTieStep;
    }
    while (!ts.empty() && ts.back() >= horizon) ts.pop_back();
}

}  // namespace

RateProfile RateProfile::constant(double rate) {
    RateProfile p;
    p.breakpoints.push_back({0.0, rate});
    return p;
}

void RateProfile::validate() const {
    if (breakpoints.empty()) throw CoverageError("rate profile: no breakpoints");
    if (breakpoints.front().t != 0.0)
        throw CoverageError("rate profile: first breakpoint must be at t = 0");
    double prev = -1.0;
    for (const auto& b : breakpoints) {
        if (b.t <= prev) throw ParamError("rate profile: breakpoints must be sorted by t");
        if (b.rate < 0.0 || !std::isfinite(b.rate))
            throw ParamError("rate profile: rates must be nonnegative");
        prev = b.t;
    }
    if (period < 0.0) throw ParamError("rate profile: period must be nonnegative");
    if (period > 0.0 && breakpoints.back().t >= period)
        throw ParamError("rate profile: breakpoints must fall inside the period");
}

double RateProfile::rate_at(double t) const {
    if (t < 0.0) return breakpoints.front().rate;
    double local = period > 0.0 ? std::fmod(t, period) : t;
    std::size_t i = 0;
    while (i + 1 < breakpoints.size() && breakpoints[i + 1].t <= local) ++i;
    if (interpolation == Interpolation::piecewise_constant) return breakpoints[i].rate;

    double t0 = breakpoints[i].t, r0 = breakpoints[i].rate;
    double t1, r1;
    if (i + 1 < breakpoints.size()) {
        t1 = breakpoints[i + 1].t;
        r1 = breakpoints[i + 1].rate;
    } else if (period > 0.0) {
        t1 = period;  // wrap back to the first breakpoint
        r1 = breakpoints.front().rate;
    } else {
        return r0;
    }
    if (t1 <= t0) return r0;
    double f = (local - t0) / (t1 - t0);
    return r0 + f * (r1 - r0);
}

double RateProfile::mean_rate(double horizon) const {
    if (!(horizon > 0.0)) throw ParamError("rate profile: horizon must be positive");
    double acc = 0.0;
    for (const auto& s : segments_over(*this, horizon)) acc += s.rate * (s.t1 - s.t0);
    return acc / horizon;
}

ArrivalSpec ArrivalSpec::exponential() {
    ArrivalSpec s;
    s.iat_family = DistributionSpec::exponential(1.0);
    s.target_cv = 1.0;
    return s;
}

ArrivalSpec ArrivalSpec::with_cv(Family family, double cv) {
    if (!(cv > 0.0)) throw ParamError("arrival spec: target cv must be positive");
    ArrivalSpec s;
    s.target_cv = cv;
    switch (family) {
        case Family::exponential:
            if (std::fabs(cv - 1.0) > 1e-9)
                throw ParamError("arrival spec: Exponential implies cv = 1");
            s.iat_family = DistributionSpec::exponential(1.0);
            break;
        case Family::gamma:
            s.iat_family = DistributionSpec::gamma(1.0 / (cv * cv), 1.0);
            break;
        case Family::weibull:
            s.iat_family = DistributionSpec::weibull(weibull_shape_for_cv(cv), 1.0);
            break;
        default:
            throw ParamError("arrival spec: cv-parameterized family must be renewal-capable");
    }
    return s;
}

void ArrivalSpec::validate() const {
    iat_family.validate();
    switch (iat_family.family) {
        case Family::exponential:
        case Family::gamma:
        case Family::weibull:
        case Family::empirical:
            break;
        default:
            throw ParamError("arrival spec: IAT family must be Exponential, Gamma, Weibull, or Empirical");
    }
    if (!(mean(iat_family) > 0.0) || !std::isfinite(mean(iat_family)))
        throw ParamError("arrival spec: IAT family must have a finite positive mean");
    if (target_cv > 0.0) {
        double implied = implied_cv();
        if (std::fabs(implied - target_cv) > 1e-6 * std::max(1.0, target_cv))
            throw ParamError("arrival spec: IAT family does not match target_cv");
    }
}

double ArrivalSpec::implied_cv() const {
    switch (iat_family.family) {
        case Family::exponential:
            return 1.0;
        case Family::gamma:
            return 1.0 / std::sqrt(iat_family.shape);
        case Family::weibull:
            return weibull_cv(iat_family.shape);
        case Family::empirical:
            return iat_family.samples.size() >= 2 ? cv(iat_family.samples) : 0.0;
        default:
            throw ParamError("arrival spec: unsupported IAT family");
    }
}

double weibull_shape_for_cv(double cv) {
    if (!(cv > 0.0)) throw ParamError("weibull_shape_for_cv: cv must be positive");
    double lo = 0.05, hi = 100.0;  // cv is decreasing in the shape
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (weibull_cv(mid) > cv) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-12 * mid) break;
    }
    return 0.5 * (lo + hi);
}

TimestampStream sample_renewal(const ArrivalSpec& spec, double mean_rate, double horizon,
                               RandomStream& stream) {
    if (!(mean_rate > 0.0)) throw ParamError("sample_renewal: mean_rate must be positive");
    if (!(horizon > 0.0)) throw ParamError("sample_renewal: horizon must be positive");
    spec.validate();

    double scale = 1.0 / (mean_rate * mean(spec.iat_family));
    TimestampStream out;
    out.horizon = horizon;
    double t = 0.0;
    for (;;) {
        t += sample_one(spec.iat_family, stream) * scale;
        if (t >= horizon) break;
        out.timestamps.push_back(t);
    }
    enforce_strictly_increasing(out.timestamps, horizon);
    return out;
}

TimestampStream modulate(const ArrivalSpec& spec, const RateProfile& profile, double horizon,
                         RandomStream& stream) {
    if (!(horizon > 0.0)) throw ParamError("modulate: horizon must be positive");
    spec.validate();
    profile.validate();

    // Time-change construction: IATs are drawn in unit-mean "work" units and
    // an arrival fires once the integrated rate accumulates that much work.
    // Within a constant segment this is exactly a renewal process at the
    // segment rate; across boundaries the residual rescales with the rate.
    double norm = 1.0 / mean(spec.iat_family);
    TimestampStream out;
    out.horizon = horizon;
    double work_needed = sample_one(spec.iat_family, stream) * norm;
    for (const auto& seg : segments_over(profile, horizon)) {
        if (seg.rate <= 0.0) continue;
        double t = seg.t0;
        for (;;) {
            double available = seg.rate * (seg.t1 - t);
            if (work_needed > available) {
                work_needed -= available;
                break;
            }
            t += work_needed / seg.rate;
            if (t >= horizon) return out;
            out.timestamps.push_back(t);
            work_needed = sample_one(spec.iat_family, stream) * norm;
        }
    }
    enforce_strictly_increasing(out.timestamps, horizon);
    return out;
}

std::vector<WindowStats> windowed_stats(const TimestampStream& stream, double window) {
    if (!(window > 0.0)) throw ParamError("windowed_stats: window must be positive");
    if (stream.timestamps.empty()) return {};

    double span = stream.horizon > 0.0 ? stream.horizon : stream.timestamps.back() + window;
    auto n_windows = static_cast<std::size_t>(std::ceil(span / window));
    std::vector<WindowStats> out(n_windows);
    std::vector<std::vector<double>> iats(n_windows);

    const auto& ts = stream.timestamps;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        auto w = static_cast<std::size_t>(ts[i] / window);
        if (w >= n_windows) continue;
        out[w].count += 1;
        if (i + 1 < ts.size()) iats[w].push_back(ts[i + 1] - ts[i]);
    }
    for (std::size_t w = 0; w < n_windows; ++w) {
        out[w].window_start = static_cast<double>(w) * window;
        out[w].rate = static_cast<double>(out[w].count) / window;
        if (out[w].count >= 3 && iats[w].size() >= 2) out[w].iat_cv = cv(iats[w]);
    }
    return out;
}

nlohmann::json to_json(const RateProfile& profile) {
    nlohmann::json bps = nlohmann::json::array();
    for (const auto& b : profile.breakpoints) bps.push_back({b.t, b.rate});
    nlohmann::json j{{"breakpoints", bps},
                     {"interpolation",
                      profile.interpolation == RateProfile::Interpolation::piecewise_constant
                          ? "piecewise-constant"
                          : "piecewise-linear"}};
    if (profile.period > 0.0) j["period"] = profile.period;
    return j;
}

RateProfile rate_profile_from_json(const nlohmann::json& j) {
    RateProfile p;
    for (const auto& b : j.at("breakpoints")) {
        p.breakpoints.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    }
    std::string interp = j.value("interpolation", "piecewise-constant");
    if (interp == "piecewise-constant") {
        p.interpolation = RateProfile::Interpolation::piecewise_constant;
    } else if (interp == "piecewise-linear") {
        p.interpolation = RateProfile::Interpolation::piecewise_linear;
    } else {
        throw ParamError("rate profile: unknown interpolation " + interp);
    }
    p.period = j.value("period", 0.0);
    p.validate();
    return p;
}

nlohmann::json to_json(const ArrivalSpec& spec) {
    nlohmann::json j{{"iat", to_json(spec.iat_family)}};
    if (spec.target_cv > 0.0) j["target_cv"] = spec.target_cv;
    return j;
}

ArrivalSpec arrival_spec_from_json(const nlohmann::json& j) {
    ArrivalSpec s;
    if (j.contains("iat")) {
        s.iat_family = spec_from_json(j.at("iat"));
        s.target_cv = j.value("target_cv", 0.0);
    } else if (j.contains("target_cv")) {
        // Shorthand: family name + cv, shape derived.
        Family fam = family_from_name(j.value("family", "Gamma"));
        return ArrivalSpec::with_cv(fam, j.at("target_cv").get<double>());
    } else {
        throw ParamError("arrival spec: expected 'iat' or 'target_cv'");
    }
    s.validate();
    return s;
}

}  // namespace workgen
