#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "workgen/datamodel.hpp"
#include "workgen/gof.hpp"

using namespace workgen;

namespace {

LanguageDataSpec language_spec(double correlation) {
    double split = std::exp(5.0 + 1.6449);
    return LanguageDataSpec{
        DistributionSpec::body_tail(DistributionSpec::log_normal(5.0, 1.0),
                                    DistributionSpec::pareto(2.0, split), split, 0.95),
        DistributionSpec::exponential(1.0 / 300.0), correlation};
}

DistributionSpec bimodal_ratio(double w, double mode1, double mode2) {
    double s1 = 0.35, s2 = 0.12;
    return DistributionSpec::two_component(
        DistributionSpec::log_normal(std::log(mode1) + s1 * s1, s1),
        DistributionSpec::log_normal(std::log(mode2) + s2 * s2, s2), w);
}

}  // namespace

TEST_CASE("zero coupling leaves input and output independent") {
    auto spec = language_spec(0.0);
    RandomStream s(1);
    std::vector<double> in, out;
    for (int i = 0; i < 100000; ++i) {
        auto d = sample_language(spec, s);
        in.push_back(static_cast<double>(d.input_tokens));
        out.push_back(static_cast<double>(d.output_tokens));
    }
    CHECK(std::fabs(testutil::pearson(in, out)) <= 0.02);
}

TEST_CASE("copula coupling preserves the exponential output marginal") {
    auto spec = language_spec(0.6);
    RandomStream s(2);
    std::vector<double> out;
    for (int i = 0; i < 100000; ++i) {
        out.push_back(static_cast<double>(sample_language(spec, s).output_tokens));
    }
    CHECK(cv(out) == doctest::Approx(1.0).epsilon(0.03));

    // KS against plain quantile draws from the same marginal.
    RandomStream s2(3);
    std::vector<double> plain;
    for (int i = 0; i < 100000; ++i) {
        plain.push_back(std::max(1.0, std::floor(quantile(spec.output, s2.next_uniform()) + 0.5)));
    }
    CHECK(ks_two_sample(out, plain).statistic <= 0.01);
}

TEST_CASE("degenerate point-mass input") {
    LanguageDataSpec spec{DistributionSpec::log_normal(std::log(100.0), 1e-6),
                          DistributionSpec::exponential(0.01), 0.0};
    RandomStream s(4);
    for (int i = 0; i < 1000; ++i) {
        CHECK(sample_language(spec, s).input_tokens == 100);
    }
}

TEST_CASE("output cap truncates") {
    LanguageDataSpec spec{DistributionSpec::log_normal(4.0, 0.5),
                          DistributionSpec::exponential(1.0 / 50000.0), 0.0};
    RandomStream s(5);
    SampleOptions opts;
    for (int i = 0; i < 2000; ++i) {
        CHECK(sample_language(spec, s, opts).output_tokens <= opts.output_cap);
    }
}

TEST_CASE("zero modal counts give pure text requests") {
    MultimodalDataSpec spec;
    spec.text = language_spec(0.1);
    spec.modalities.push_back(
        {Modality::image, DistributionSpec::empirical({0.0}), DistributionSpec::empirical({1200.0})});
    RandomStream s(6);
    for (int i = 0; i < 200; ++i) {
        CHECK(sample_multimodal(spec, s).modal_items.empty());
    }
}

TEST_CASE("fixed-size image client sends 1200-token items") {
    MultimodalDataSpec spec;
    spec.text = language_spec(0.1);
    spec.modalities.push_back(
        {Modality::image, DistributionSpec::empirical({1.0}), DistributionSpec::empirical({1200.0})});
    RandomStream s(7);
    for (int i = 0; i < 500; ++i) {
        auto d = sample_multimodal(spec, s);
        REQUIRE(d.modal_items.size() == 1);
        CHECK(d.modal_items[0].tokens == 1200);
        CHECK(d.modal_items[0].modality == Modality::image);
    }
}

TEST_CASE("modal ratio arithmetic") {
    RequestData d;
    d.input_tokens = 100;
    CHECK(modal_ratio(d) == 0.0);
    d.modal_items.push_back({Modality::image, 300});
    CHECK(modal_ratio(d) == doctest::Approx(0.75));
}

TEST_CASE("text and modal tokens are independent") {
    MultimodalDataSpec spec;
    spec.text = language_spec(0.2);
    spec.modalities.push_back({Modality::image, DistributionSpec::empirical({0.0, 1.0, 2.0}),
                               DistributionSpec::empirical({258.0, 602.0, 1200.0})});
    RandomStream s(8);
    std::vector<double> text, modal;
    for (int i = 0; i < 100000; ++i) {
        auto d = sample_multimodal(spec, s);
        double m = 0.0;
        for (const auto& item : d.modal_items) m += static_cast<double>(item.tokens);
        text.push_back(static_cast<double>(d.input_tokens));
        modal.push_back(m);
    }
    CHECK(std::fabs(testutil::pearson(text, modal)) <= 0.02);
}

TEST_CASE("point-mass answer fraction gives reason four times answer") {
    ReasoningDataSpec spec;
    spec.input = DistributionSpec::log_normal(5.0, 0.5);
    spec.output = DistributionSpec::exponential(1.0 / 2000.0);
    spec.ratio_mix = DistributionSpec::empirical({0.2});
    spec.reason_answer_corr = 0.0;
    RandomStream s(9);
    double reason = 0.0, answer = 0.0;
    for (int i = 0; i < 20000; ++i) {
        auto d = sample_reasoning(spec, s);
        reason += static_cast<double>(d.reason_tokens);
        answer += static_cast<double>(d.answer_tokens);
    }
    CHECK(reason / answer == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("fixed output and fraction split exactly") {
    ReasoningDataSpec spec;
    spec.input = DistributionSpec::log_normal(5.0, 0.5);
    spec.output = DistributionSpec::empirical({10.0});
    spec.ratio_mix = DistributionSpec::empirical({0.5});
    spec.reason_answer_corr = 0.0;
    RandomStream s(10);
    auto d = sample_reasoning(spec, s);
    CHECK(d.output_tokens == 10);
    CHECK(d.reason_tokens == 5);
    CHECK(d.answer_tokens == 5);
}

TEST_CASE("reason plus answer always equals output") {
    ReasoningDataSpec spec;
    spec.input = DistributionSpec::log_normal(5.0, 0.5);
    spec.output = DistributionSpec::exponential(1.0 / 3.0);  // tiny outputs stress the clamps
    spec.ratio_mix = bimodal_ratio(0.9, 0.12, 0.48);
    spec.reason_answer_corr = 0.25;
    RandomStream s(11);
    for (int i = 0; i < 50000; ++i) {
        auto d = sample_reasoning(spec, s);
        CHECK(d.reason_tokens + d.answer_tokens == d.output_tokens);
        CHECK(d.answer_tokens >= 1);
        if (d.output_tokens >= 2) CHECK(d.reason_tokens >= 1);
    }
}

TEST_CASE("bimodal ratio mix yields two histogram modes") {
    ReasoningDataSpec spec;
    spec.input = DistributionSpec::log_normal(5.0, 0.5);
    spec.output = DistributionSpec::exponential(1.0 / 2000.0);
    spec.ratio_mix = bimodal_ratio(0.75, 0.15, 0.6);
    spec.reason_answer_corr = 0.0;
    RandomStream s(12);
    std::vector<std::size_t> hist(100, 0);
    for (int i = 0; i < 100000; ++i) {
        auto d = sample_reasoning(spec, s);
        double frac = static_cast<double>(d.answer_tokens) / static_cast<double>(d.output_tokens);
        auto bin = static_cast<std::size_t>(frac * 100.0);
        if (bin >= 100) bin = 99;
        hist[bin] += 1;
    }
    auto modes = testutil::histogram_modes(hist);
    CHECK(modes.size() == 2);
}

TEST_CASE("positive coupling strengthens the reason-answer relation") {
    auto run = [](double corr) {
        ReasoningDataSpec spec;
        spec.input = DistributionSpec::log_normal(5.0, 0.5);
        spec.output = DistributionSpec::exponential(1.0 / 2000.0);
        spec.ratio_mix = bimodal_ratio(0.9, 0.12, 0.48);
        spec.reason_answer_corr = corr;
        RandomStream s(13);
        std::vector<double> reason, answer;
        for (int i = 0; i < 50000; ++i) {
            auto d = sample_reasoning(spec, s);
            reason.push_back(static_cast<double>(d.reason_tokens));
            answer.push_back(static_cast<double>(d.answer_tokens));
        }
        return testutil::pearson(reason, answer);
    };
    double base = run(0.0);
    double coupled = run(0.5);
    CHECK(base > 0.0);  // splitting one output induces positive correlation already
    CHECK(coupled > 0.0);
}

TEST_CASE("data spec json round trip") {
    MultimodalDataSpec spec;
    spec.text = language_spec(0.2);
    spec.modalities.push_back({Modality::video, DistributionSpec::empirical({1.0}),
                               DistributionSpec::empirical({2500.0})});
    DataSpec ds = spec;
    auto round = data_spec_from_json(to_json(ds));
    CHECK(category_of(round) == Category::multimodal);
    const auto& mm = std::get<MultimodalDataSpec>(round);
    REQUIRE(mm.modalities.size() == 1);
    CHECK(mm.modalities[0].modality == Modality::video);
}
