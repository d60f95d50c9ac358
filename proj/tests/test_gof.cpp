#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "workgen/gof.hpp"
#include "workgen/math.hpp"

using namespace workgen;

TEST_CASE("samples at midpoint quantiles give D = 0.5/n") {
    auto spec = DistributionSpec::exponential(1.0);
    for (std::size_t n : {4u, 10u, 100u}) {
        std::vector<double> xs;
        for (std::size_t i = 1; i <= n; ++i) {
            xs.push_back(quantile(spec, (static_cast<double>(i) - 0.5) / static_cast<double>(n)));
        }
        auto res = ks_test(xs, spec);
        CHECK(res.statistic == doctest::Approx(0.5 / static_cast<double>(n)).epsilon(1e-9));
    }
}

TEST_CASE("hand-computed statistic over the four one-sided gaps") {
    // samples {0.25, 0.75} against F(x) = x: all four gaps equal 0.25.
    std::vector<double> xs = {0.25, 0.75};
    double d = ks_statistic(xs, [](double x) { return x; });
    CHECK(d == doctest::Approx(0.25));
}

TEST_CASE("large mismatched sample drives the p-value to zero") {
    RandomStream s(5);
    auto xs = sample(DistributionSpec::log_normal(0.0, 1.5), 20000, s);
    auto res = ks_test(xs, DistributionSpec::exponential(1.0 / testutil::mean(xs)));
    CHECK(res.p_value < 1e-6);
    CHECK(res.statistic > 0.05);
}

TEST_CASE("kolmogorov survival function at published critical values") {
    CHECK(math::kolmogorov_sf(1.3581) == doctest::Approx(0.05).epsilon(0.01));
    CHECK(math::kolmogorov_sf(1.2238) == doctest::Approx(0.10).epsilon(0.01));
    CHECK(math::kolmogorov_sf(1.6276) == doctest::Approx(0.01).epsilon(0.02));
    CHECK(math::kolmogorov_sf(0.0) == 1.0);
}

TEST_CASE("p-values are roughly uniform under the null") {
    int below = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        RandomStream s = RandomStream(1234).derive(static_cast<std::uint64_t>(t));
        auto spec = DistributionSpec::exponential(1.0);
        auto xs = sample(spec, 500, s);
        if (ks_test(xs, spec).p_value < 0.05) below += 1;
    }
    double frac = static_cast<double>(below) / trials;
    CHECK(frac >= 0.02);
    CHECK(frac <= 0.08);
}

TEST_CASE("two-sample ks") {
    std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
    auto res = ks_two_sample(a, a);
    CHECK(res.statistic == 0.0);
    std::vector<double> b = {10.0, 11.0, 12.0, 13.0};
    CHECK(ks_two_sample(a, b).statistic == doctest::Approx(1.0));

    RandomStream s(6);
    auto xs = sample(DistributionSpec::gamma(0.5, 1.0), 5000, s);
    auto ys = sample(DistributionSpec::gamma(0.5, 1.0), 5000, s);
    CHECK(ks_two_sample(xs, ys).p_value > 0.01);
}

TEST_CASE("cv oracle values") {
    std::vector<double> constant(100, 5.0);
    CHECK(cv(constant) == 0.0);

    RandomStream s(7);
    auto ex = sample(DistributionSpec::exponential(3.0), 100000, s);
    CHECK(cv(ex) == doctest::Approx(1.0).epsilon(0.02));

    auto gm = sample(DistributionSpec::gamma(0.25, 1.0), 100000, s);
    CHECK(cv(gm) == doctest::Approx(2.0).epsilon(0.05));
}
