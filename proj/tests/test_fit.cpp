#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "workgen/error.hpp"
#include "workgen/fit.hpp"

using namespace workgen;

TEST_CASE("exponential mle is the reciprocal sample mean") {
    std::vector<double> xs = {1.0, 2.0, 3.0, 6.0};
    auto fit = fit_mle(Family::exponential, xs);
    CHECK(fit.spec.rate == doctest::Approx(1.0 / 3.0));
    CHECK(fit.n_samples == 4);
    CHECK(std::isfinite(fit.log_likelihood));
}

TEST_CASE("pareto mle matches the closed-form estimator") {
    std::vector<double> xs;
    for (int i = 0; i < 10; ++i) xs.push_back(std::pow(2.0, i));
    double acc = 0.0;
    for (double x : xs) acc += std::log(x / 1.0);
    auto fit = fit_mle(Family::pareto, xs);
    CHECK(fit.spec.minimum == doctest::Approx(1.0));
    CHECK(fit.spec.alpha == doctest::Approx(10.0 / acc).epsilon(1e-12));
}

TEST_CASE("gamma self-recovery at shape 0.5") {
    RandomStream s(42);
    auto xs = sample(DistributionSpec::gamma(0.5, 2.0), 50000, s);
    auto fit = fit_mle(Family::gamma, xs);
    CHECK(fit.spec.shape == doctest::Approx(0.5).epsilon(0.05));
    CHECK(fit.spec.scale == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("weibull self-recovery") {
    RandomStream s(43);
    auto xs = sample(DistributionSpec::weibull(0.8, 3.0), 50000, s);
    auto fit = fit_mle(Family::weibull, xs);
    CHECK(fit.spec.shape == doctest::Approx(0.8).epsilon(0.05));
    CHECK(fit.spec.scale == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("lognormal self-recovery") {
    RandomStream s(44);
    auto xs = sample(DistributionSpec::log_normal(2.0, 1.0), 50000, s);
    auto fit = fit_mle(Family::log_normal, xs);
    CHECK(fit.spec.mu == doctest::Approx(2.0).epsilon(0.05));
    CHECK(fit.spec.sigma == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("fitted parameters maximize the likelihood locally") {
    RandomStream s(45);
    auto xs = sample(DistributionSpec::gamma(0.7, 1.5), 20000, s);
    auto fit = fit_mle(Family::gamma, xs);
    double best = log_likelihood(fit.spec, xs);
    for (double dk : {-0.03, 0.03}) {
        for (double dt : {-0.05, 0.05}) {
            auto nearby = DistributionSpec::gamma(fit.spec.shape + dk, fit.spec.scale + dt);
            CHECK(log_likelihood(nearby, xs) <= best + 1e-9);
        }
    }
}

TEST_CASE("constant data degenerates for variance-requiring families") {
    std::vector<double> xs(100, 3.0);
    CHECK_THROWS_AS(fit_mle(Family::gamma, xs), DegenerateDataError);
    CHECK_THROWS_AS(fit_mle(Family::weibull, xs), DegenerateDataError);
    CHECK_THROWS_AS(fit_mle(Family::log_normal, xs), DegenerateDataError);
    CHECK_THROWS_AS(fit_mle(Family::pareto, xs), DegenerateDataError);
    CHECK(fit_mle(Family::exponential, xs).spec.rate == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("fit_mle input validation") {
    CHECK_THROWS_AS(fit_mle(Family::exponential, std::vector<double>{1.0}), ParamError);
    CHECK_THROWS_AS(fit_mle(Family::exponential, std::vector<double>{1.0, -2.0}), ParamError);
    CHECK_THROWS_AS(fit_mle(Family::empirical, std::vector<double>{1.0, 2.0}), ParamError);
}

TEST_CASE("body-tail split weight is the tail quantile by construction") {
    RandomStream s(46);
    auto xs = sample(DistributionSpec::log_normal(5.0, 1.0), 10000, s);
    auto mix = fit_body_tail(xs, 0.95);
    CHECK(mix.weight == doctest::Approx(0.95));
    CHECK(mix.second->minimum == doctest::Approx(mix.split));
}

TEST_CASE("body-tail recovers a known tail index within 15 percent") {
    double split = std::exp(5.0 + 1.6449 * 1.0);
    auto truth = DistributionSpec::body_tail(DistributionSpec::log_normal(5.0, 1.0),
                                             DistributionSpec::pareto(1.5, split), split, 0.95);
    RandomStream s(47);
    auto xs = sample(truth, 20000, s);
    auto fitted = fit_body_tail(xs, 0.95);
    CHECK(fitted.second->alpha == doctest::Approx(1.5).epsilon(0.15));
    CHECK(fitted.first->mu == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("capped samples leave no tail to fit") {
    // Top 10% all capped to one value: the split lands on the cap and no
    // sample exceeds it.
    std::vector<double> xs;
    for (int i = 0; i < 900; ++i) xs.push_back(1.0 + i * 0.01);
    for (int i = 0; i < 100; ++i) xs.push_back(50.0);
    CHECK_THROWS_AS(fit_body_tail(xs, 0.95), InsufficientTailError);
}

TEST_CASE("fit_body_tail needs enough samples") {
    std::vector<double> xs(99, 1.0);
    CHECK_THROWS_AS(fit_body_tail(xs, 0.95), ParamError);
}
