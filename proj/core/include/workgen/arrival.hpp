#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "workgen/distribution.hpp"
#include "workgen/random.hpp"
#include "workgen/window_stats.hpp"

namespace workgen {

// Time-varying rate, given as breakpoints from t = 0. Piecewise-constant
// profiles hold each rate until the next breakpoint; piecewise-linear ones
// interpolate between breakpoints. Past the last breakpoint the final rate
// holds, unless `period` > 0, in which case the profile repeats.
struct RateProfile {
    enum class Interpolation { piecewise_constant, piecewise_linear };
    struct Breakpoint {
        double t = 0.0;
        double rate = 0.0;
    };

    std::vector<Breakpoint> breakpoints;
    Interpolation interpolation = Interpolation::piecewise_constant;
    double period = 0.0;

    static RateProfile constant(double rate);

    void validate() const;
    double rate_at(double t) const;
    /// Mean rate over [0, horizon).
    double mean_rate(double horizon) const;
};

// Renewal IAT family plus an optional convenience CV the family must match.
struct ArrivalSpec {
    DistributionSpec iat_family = DistributionSpec::exponential(1.0);
    double target_cv = 0.0;  // 0 = unspecified

    static ArrivalSpec exponential();
    /// Gamma or Weibull family with the shape solved from the target CV.
    static ArrivalSpec with_cv(Family family, double cv);

    void validate() const;
    /// CV implied by the IAT family.
    double implied_cv() const;
};

/// Weibull shape whose renewal CV equals `cv` (solved numerically).
double weibull_shape_for_cv(double cv);

struct TimestampStream {
    std::vector<double> timestamps;  // strictly increasing, within [0, horizon)
    double horizon = 0.0;
};

/// Renewal process with IATs drawn from the spec's family rescaled so the
/// mean IAT equals 1 / mean_rate; the first arrival falls one IAT after 0.
TimestampStream sample_renewal(const ArrivalSpec& spec, double mean_rate, double horizon,
                               RandomStream& stream);

/// Renewal process modulated by a rate profile. Linear profiles are
/// discretized to 60 s piecewise-constant segments; within each segment
/// arrivals keep the spec's IAT family, and the residual IAT crosses segment
/// boundaries with rate-proportional rescaling.
TimestampStream modulate(const ArrivalSpec& spec, const RateProfile& profile, double horizon,
                         RandomStream& stream);

/// Per-window rate and IAT CV; IATs belong to the window holding their left
/// endpoint, and windows with fewer than 3 arrivals report no CV.
std::vector<WindowStats> windowed_stats(const TimestampStream& stream, double window);

nlohmann::json to_json(const RateProfile& profile);
RateProfile rate_profile_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ArrivalSpec& spec);
ArrivalSpec arrival_spec_from_json(const nlohmann::json& j);

}  // namespace workgen
