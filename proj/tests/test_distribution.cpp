#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "workgen/distribution.hpp"
#include "workgen/error.hpp"
#include "workgen/gof.hpp"
#include "workgen/math.hpp"

using namespace workgen;

TEST_CASE("exponential sample mean matches 1/lambda") {
    RandomStream s(1);
    auto xs = sample(DistributionSpec::exponential(2.0), 200000, s);
    CHECK(testutil::mean(xs) == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("gamma shape 1 reduces to exponential") {
    auto g = DistributionSpec::gamma(1.0, 0.5);
    auto w = DistributionSpec::weibull(1.0, 0.5);
    auto e = DistributionSpec::exponential(2.0);
    for (double x = 0.01; x < 5.0; x += 0.037) {
        CHECK(std::fabs(pdf(g, x) - pdf(e, x)) < 1e-12);
        CHECK(std::fabs(pdf(w, x) - pdf(e, x)) < 1e-12);
        CHECK(std::fabs(cdf(g, x) - cdf(e, x)) < 1e-12);
    }
    // Distributional identity of draws, checked against the exponential CDF.
    RandomStream s(2);
    auto xs = sample(g, 5000, s);
    CHECK(ks_test(xs, e).p_value > 0.01);
}

TEST_CASE("pareto mean recovered by brute-force sampling") {
    RandomStream s(3);
    auto xs = sample(DistributionSpec::pareto(2.0, 1.0), 100000, s);
    // analytic mean alpha*x_m/(alpha-1) = 2
    CHECK(testutil::mean(xs) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("closed-form cdf values") {
    CHECK(cdf(DistributionSpec::exponential(1.0), std::log(2.0)) == doctest::Approx(0.5));
    CHECK(cdf(DistributionSpec::pareto(1.0, 1.0), 2.0) == doctest::Approx(0.5));
    auto p = DistributionSpec::pareto(1.5, 2.0);
    CHECK(cdf(p, 1.0) == 0.0);
    CHECK(pdf(p, 1.0) == 0.0);
}

TEST_CASE("body-tail mixture degenerate weight follows the body below the split") {
    auto body = DistributionSpec::log_normal(3.0, 0.5);
    double split = std::exp(3.0 + 4.0 * 0.5);  // far tail: truncation negligible
    auto mix = DistributionSpec::body_tail(body, DistributionSpec::pareto(1.5, split), split, 1.0);
    for (double x = 1.0; x < split; x *= 1.7) {
        CHECK(cdf(mix, x) == doctest::Approx(cdf(body, x)).epsilon(1e-6));
    }
}

TEST_CASE("mixture cdf is the weighted component cdf") {
    auto body = DistributionSpec::log_normal(2.0, 0.6);
    double split = std::exp(2.0 + 1.6449 * 0.6);
    auto tail = DistributionSpec::pareto(1.8, split);
    auto mix = DistributionSpec::body_tail(body, tail, split, 0.95);
    double denom = cdf(body, split);
    for (double x : {1.0, 3.0, 7.0, split - 0.1}) {
        CHECK(cdf(mix, x) == doctest::Approx(0.95 * cdf(body, x) / denom));
    }
    for (double x : {split + 1.0, split * 2.0, split * 10.0}) {
        CHECK(cdf(mix, x) == doctest::Approx(0.95 + 0.05 * cdf(tail, x)));
    }
}

TEST_CASE("cdf is monotone nondecreasing on a 1000-point grid") {
    std::vector<DistributionSpec> specs = {
        DistributionSpec::exponential(0.7),
        DistributionSpec::gamma(0.35, 2.0),
        DistributionSpec::weibull(0.8, 1.5),
        DistributionSpec::pareto(1.6, 0.5),
        DistributionSpec::log_normal(1.0, 1.2),
        DistributionSpec::empirical({0.5, 1.0, 1.0, 2.5, 7.0}),
        DistributionSpec::body_tail(DistributionSpec::log_normal(2.0, 0.8),
                                    DistributionSpec::pareto(1.5, 30.0), 30.0, 0.9),
        DistributionSpec::two_component(DistributionSpec::log_normal(0.0, 0.3),
                                        DistributionSpec::log_normal(1.5, 0.3), 0.6),
    };
    for (const auto& spec : specs) {
        double prev = -1.0;
        for (int i = 0; i < 1000; ++i) {
            double x = 0.01 + 0.05 * i;
            double c = cdf(spec, x);
            CHECK(c >= prev);
            CHECK(c <= 1.0);
            CHECK(pdf(spec, x) >= 0.0);
            prev = c;
        }
    }
}

TEST_CASE("quantile inverts the cdf") {
    std::vector<DistributionSpec> specs = {
        DistributionSpec::exponential(2.0),
        DistributionSpec::gamma(0.25, 4.0),
        DistributionSpec::gamma(5.0, 0.1),
        DistributionSpec::weibull(1.7, 2.2),
        DistributionSpec::pareto(2.5, 1.0),
        DistributionSpec::log_normal(0.5, 0.9),
        DistributionSpec::body_tail(DistributionSpec::log_normal(2.0, 0.8),
                                    DistributionSpec::pareto(1.5, 30.0), 30.0, 0.9),
        DistributionSpec::two_component(DistributionSpec::log_normal(0.0, 0.3),
                                        DistributionSpec::log_normal(1.5, 0.3), 0.6),
    };
    for (const auto& spec : specs) {
        for (double u = 0.001; u < 0.999; u += 0.0173) {
            double x = quantile(spec, u);
            CHECK(cdf(spec, x) == doctest::Approx(u).epsilon(1e-6));
        }
    }
}

TEST_CASE("empirical sampling draws uniformly with replacement") {
    auto spec = DistributionSpec::empirical({1.0, 2.0, 3.0, 4.0});
    RandomStream s(11);
    auto xs = sample(spec, 40000, s);
    std::vector<int> counts(5, 0);
    for (double x : xs) counts[static_cast<int>(x)] += 1;
    for (int v = 1; v <= 4; ++v) {
        CHECK(counts[v] == doctest::Approx(10000).epsilon(0.05));
    }
}

TEST_CASE("sampling is bitwise deterministic for a fixed stream") {
    auto spec = DistributionSpec::gamma(0.5, 2.0);
    RandomStream a(99), b(99);
    auto xs = sample(spec, 1000, a);
    auto ys = sample(spec, 1000, b);
    CHECK(xs == ys);
    RandomStream c = RandomStream(99).derive("other");
    auto zs = sample(spec, 1000, c);
    CHECK(xs != zs);
}

TEST_CASE("analytic means agree with monte carlo") {
    auto mix = DistributionSpec::body_tail(DistributionSpec::log_normal(2.0, 0.8),
                                           DistributionSpec::pareto(2.5, 30.0), 30.0, 0.9);
    RandomStream s(7);
    auto xs = sample(mix, 400000, s);
    CHECK(testutil::mean(xs) == doctest::Approx(mean(mix)).epsilon(0.02));
    CHECK(mean(DistributionSpec::weibull(2.0, 3.0)) ==
          doctest::Approx(3.0 * std::sqrt(3.141592653589793) / 2.0));
    CHECK(std::isinf(mean(DistributionSpec::pareto(0.9, 1.0))));
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(DistributionSpec::exponential(0.0), ParamError);
    CHECK_THROWS_AS(DistributionSpec::gamma(-1.0, 1.0), ParamError);
    CHECK_THROWS_AS(DistributionSpec::pareto(1.0, 0.0), ParamError);
    CHECK_THROWS_AS(DistributionSpec::log_normal(0.0, 0.0), ParamError);
    CHECK_THROWS_AS(DistributionSpec::empirical({}), ParamError);
    CHECK_THROWS_AS(DistributionSpec::two_component(DistributionSpec::exponential(1.0),
                                                    DistributionSpec::exponential(2.0), 1.5),
                    ParamError);
    // Tail mass below the split is invalid.
    CHECK_THROWS_AS(DistributionSpec::body_tail(DistributionSpec::log_normal(0.0, 1.0),
                                                DistributionSpec::pareto(1.5, 1.0), 10.0, 0.9),
                    ParamError);
}

TEST_CASE("json round trip preserves behavior") {
    std::vector<DistributionSpec> specs = {
        DistributionSpec::exponential(0.25),
        DistributionSpec::weibull(0.6, 5.0),
        DistributionSpec::empirical({1.0, 2.0, 2.0, 9.5}),
        DistributionSpec::body_tail(DistributionSpec::log_normal(2.0, 0.8),
                                    DistributionSpec::pareto(1.5, 30.0), 30.0, 0.9),
    };
    for (const auto& spec : specs) {
        auto round = spec_from_json(to_json(spec));
        CHECK(round.family == spec.family);
        for (double u = 0.05; u < 1.0; u += 0.1) {
            CHECK(quantile(round, u) == doctest::Approx(quantile(spec, u)));
        }
    }
}
