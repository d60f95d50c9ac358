#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "helpers.hpp"
#include "workgen/conversation.hpp"
#include "workgen/gof.hpp"

using namespace workgen;

namespace {

RequestData fixed_data(RandomStream&) {
    RequestData d;
    d.input_tokens = 100;
    d.output_tokens = 50;
    return d;
}

DataSampler sampler() {
    return [](RandomStream& s) {
        RequestData d;
        d.input_tokens = 50 + static_cast<std::int64_t>(s.next_uniform() * 100.0);
        d.output_tokens = 20 + static_cast<std::int64_t>(s.next_uniform() * 200.0);
        return d;
    };
}

ConversationSpec preset_spec() {
    ConversationSpec spec;
    spec.multi_turn_share = 0.096;
    spec.length_dist =
        DistributionSpec::empirical({2.0, 2.0, 2.0, 2.0, 3.0, 3.0, 3.0, 4.0, 5.0, 9.0});
    spec.itt_dist = DistributionSpec::log_normal(5.60517, 1.0);
    return spec;
}

TimestampStream starts_at_rate(double rate, double horizon, std::uint64_t seed) {
    RandomStream s(seed);
    return sample_renewal(ArrivalSpec::exponential(), rate, horizon, s);
}

std::vector<double> multiset_of_itts(const std::vector<Conversation>& convs) {
    std::vector<double> itts;
    for (const auto& c : convs) {
        for (std::size_t i = 1; i < c.turns.size(); ++i) {
            itts.push_back(c.turns[i].arrival - c.turns[i - 1].arrival);
        }
    }
    std::sort(itts.begin(), itts.end());
    return itts;
}

}  // namespace

TEST_CASE("point-mass length 1 keeps every conversation single-turn") {
    ConversationSpec spec;
    spec.multi_turn_share = 0.0;
    spec.length_dist = DistributionSpec::empirical({1.0});
    spec.itt_dist = DistributionSpec::empirical({100.0});
    auto starts = starts_at_rate(1.0, 200.0, 1);
    RandomStream s(2);
    auto convs = sample_conversations(spec, starts, fixed_data, s);
    REQUIRE(convs.size() == starts.timestamps.size());
    for (std::size_t i = 0; i < convs.size(); ++i) {
        CHECK(convs[i].turns.size() == 1);
        CHECK(convs[i].turns[0].arrival == starts.timestamps[i]);
    }
}

TEST_CASE("preset lengths average near 3.5 turns for multi-turn conversations") {
    auto spec = preset_spec();
    TimestampStream starts;
    starts.horizon = 1e9;  // no truncation
    for (int i = 0; i < 10000; ++i) starts.timestamps.push_back(static_cast<double>(i));
    RandomStream s(3);
    auto convs = sample_conversations(spec, starts, fixed_data, s);

    double multi_turns = 0.0, multi_count = 0.0, total_requests = 0.0, followups = 0.0;
    for (const auto& c : convs) {
        total_requests += static_cast<double>(c.turns.size());
        followups += static_cast<double>(c.turns.size() - 1);
        if (c.turns.size() >= 2) {
            multi_turns += static_cast<double>(c.turns.size());
            multi_count += 1.0;
        }
    }
    CHECK(multi_turns / multi_count == doctest::Approx(3.5).epsilon(0.06));
    // Requests belonging to multi-turn conversations track the share knob.
    CHECK(multi_turns / total_requests == doctest::Approx(0.096).epsilon(0.2));

    // Fraction with turn_index >= 2 matches the model-implied value.
    ConversationModel model = ConversationModel::build(spec);
    double q = model.singleton_prob;
    double b = model.mean_turns;  // q + (1-q) E[L]
    double implied = (b - 1.0) / b;
    (void)q;
    CHECK(followups / total_requests == doctest::Approx(implied).epsilon(0.25));
    CHECK(std::fabs(followups / total_requests - implied) < 0.02);
}

TEST_CASE("deterministic itt chains turn arrivals") {
    ConversationSpec spec;
    spec.multi_turn_share = 1.0;
    spec.length_dist = DistributionSpec::empirical({3.0});
    spec.itt_dist = DistributionSpec::empirical({100.0});
    TimestampStream starts;
    starts.horizon = 1e6;
    starts.timestamps = {5.0};
    RandomStream s(4);
    auto convs = sample_conversations(spec, starts, fixed_data, s);
    REQUIRE(convs.size() == 1);
    REQUIRE(convs[0].turns.size() == 3);
    CHECK(convs[0].turns[0].arrival == doctest::Approx(5.0));
    CHECK(convs[0].turns[1].arrival == doctest::Approx(105.0));
    CHECK(convs[0].turns[2].arrival == doctest::Approx(205.0));
    CHECK(convs[0].turns[0].turn_index == 1);
    CHECK(convs[0].turns[2].turn_index == 3);
}

TEST_CASE("history accumulates into every turn's input") {
    auto spec = preset_spec();
    spec.multi_turn_share = 0.8;  // force many multi-turn conversations
    TimestampStream starts;
    starts.horizon = 1e9;
    for (int i = 0; i < 10000; ++i) starts.timestamps.push_back(i * 10.0);
    RandomStream s(5);
    auto convs = sample_conversations(spec, starts, sampler(), s);
    std::size_t checked = 0;
    for (const auto& c : convs) {
        for (std::size_t i = 1; i < c.turns.size(); ++i) {
            CHECK(c.turns[i].data.input_tokens >= c.turns[i - 1].data.input_tokens +
                                                      c.turns[i - 1].data.output_tokens);
            checked += 1;
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("turns past the horizon are dropped") {
    ConversationSpec spec;
    spec.multi_turn_share = 1.0;
    spec.length_dist = DistributionSpec::empirical({4.0});
    spec.itt_dist = DistributionSpec::empirical({100.0});
    TimestampStream starts;
    starts.horizon = 250.0;
    starts.timestamps = {0.0, 200.0};
    RandomStream s(6);
    auto convs = sample_conversations(spec, starts, fixed_data, s);
    REQUIRE(convs.size() == 2);
    CHECK(convs[0].turns.size() == 3);  // 0, 100, 200 fit; 300 dropped
    CHECK(convs[1].turns.size() == 1);  // 200 fits; 300 dropped
}

TEST_CASE("itt upsampling preserves within-conversation gaps") {
    auto spec = preset_spec();
    spec.multi_turn_share = 1.0;
    auto starts = starts_at_rate(0.2, 20000.0, 7);
    RandomStream s(8);
    auto convs = sample_conversations(spec, starts, fixed_data, s);

    RandomStream up(9);
    auto one = upsample_itt(convs, 1.0, up);
    CHECK(one.size() == convs.size());

    auto ten = upsample_itt(convs, 10.0, up);
    CHECK(ten.size() == convs.size() * 10);
    auto before = multiset_of_itts(convs);
    auto after = multiset_of_itts(ten);
    REQUIRE(after.size() == before.size() * 10);
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(after[i * 10] == doctest::Approx(before[i]).epsilon(1e-12));
    }

    RandomStream up2(10);
    auto frac = upsample_itt(convs, 2.5, up2);
    CHECK(static_cast<double>(frac.size()) ==
          doctest::Approx(2.5 * static_cast<double>(convs.size())).epsilon(0.1));
}

TEST_CASE("naive upsampling rescales every gap") {
    TimestampStream ts;
    ts.horizon = 100.0;
    ts.timestamps = {1.0, 3.0, 8.0, 20.0};
    auto same = upsample_naive(ts, 1.0);
    CHECK(same.timestamps == ts.timestamps);
    auto half = upsample_naive(ts, 2.0);
    auto d0 = testutil::diffs(ts.timestamps);
    auto d1 = testutil::diffs(half.timestamps);
    for (std::size_t i = 0; i < d0.size(); ++i) {
        CHECK(d1[i] == doctest::Approx(d0[i] / 2.0));
    }
}

TEST_CASE("itt upsampling stays stable while naive upsampling bursts") {
    auto spec = preset_spec();
    spec.multi_turn_share = 1.0;

    // Diurnal conversation starts over half a day.
    RateProfile profile;
    profile.interpolation = RateProfile::Interpolation::piecewise_linear;
    profile.breakpoints = {{0.0, 0.1}, {10800.0, 0.5}, {21600.0, 1.2}, {32400.0, 0.4}};
    RandomStream s(11);
    auto starts = modulate(ArrivalSpec::exponential(), profile, 43200.0, s);
    RandomStream s2(12);
    auto convs = sample_conversations(spec, starts, fixed_data, s2);

    auto flat = flatten(convs);
    TimestampStream requests;
    requests.horizon = 43200.0;
    for (const auto& f : flat) requests.timestamps.push_back(f.arrival);
    std::sort(requests.timestamps.begin(), requests.timestamps.end());

    const double factor = 10.0;
    RandomStream s3(13);
    auto itt_up = upsample_itt(convs, factor, s3);
    auto itt_flat = flatten(itt_up);
    TimestampStream itt_requests;
    itt_requests.horizon = requests.horizon;
    for (const auto& f : itt_flat) itt_requests.timestamps.push_back(f.arrival);
    std::sort(itt_requests.timestamps.begin(), itt_requests.timestamps.end());

    auto naive = upsample_naive(requests, factor);

    const double window = 300.0;
    auto w_orig = windowed_stats(requests, window);
    auto w_itt = windowed_stats(itt_requests, window);
    auto w_naive = windowed_stats(naive, window);

    std::size_t pairs = 0, naive_higher = 0;
    for (std::size_t i = 0; i < std::min(w_naive.size(), w_itt.size()); ++i) {
        if (w_naive[i].iat_cv && w_itt[i].iat_cv) {
            pairs += 1;
            if (*w_naive[i].iat_cv > *w_itt[i].iat_cv) naive_higher += 1;
        }
    }
    REQUIRE(pairs >= 10);
    CHECK(static_cast<double>(naive_higher) >= 0.9 * static_cast<double>(pairs));

    std::size_t stable = 0, both = 0;
    for (std::size_t i = 0; i < std::min(w_orig.size(), w_itt.size()); ++i) {
        if (w_orig[i].iat_cv && w_itt[i].iat_cv) {
            both += 1;
            if (*w_itt[i].iat_cv <= *w_orig[i].iat_cv + 0.1) stable += 1;
        }
    }
    REQUIRE(both >= 20);
    CHECK(static_cast<double>(stable) >= 0.9 * static_cast<double>(both));
}

TEST_CASE("flatten sorts and conserves counts") {
    ConversationSpec spec;
    spec.multi_turn_share = 1.0;
    spec.length_dist = DistributionSpec::empirical({3.0});
    spec.itt_dist = DistributionSpec::empirical({50.0});
    TimestampStream starts;
    starts.horizon = 1e6;
    starts.timestamps = {0.0, 10.0, 20.0};
    RandomStream s(14);
    auto convs = sample_conversations(spec, starts, fixed_data, s);
    auto flat = flatten(convs);
    std::size_t total = 0;
    for (const auto& c : convs) total += c.turns.size();
    REQUIRE(flat.size() == total);
    for (std::size_t i = 1; i < flat.size(); ++i) {
        CHECK(flat[i].arrival >= flat[i - 1].arrival);
    }
    // one conversation in turn order
    std::map<std::string, int> last_turn;
    for (const auto& f : flat) {
        auto it = last_turn.find(f.conversation_id);
        if (it != last_turn.end()) CHECK(f.turn_index == it->second + 1);
        last_turn[f.conversation_id] = f.turn_index;
    }
}
