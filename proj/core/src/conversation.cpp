#include "workgen/conversation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "workgen/error.hpp"

namespace workgen {
namespace {

constexpr std::uint64_t kModelSeed = 0x5EEDC0DEull;
constexpr int kModelDraws = 8192;

int length_from_draw(double x) {
    auto v = static_cast<int>(std::floor(x + 0.5));
    return std::max(1, v);
}

}  // namespace

void ConversationSpec::validate() const {
    if (!(multi_turn_share >= 0.0 && multi_turn_share <= 1.0))
        throw ParamError("conversation spec: multi_turn_share must be in [0, 1]");
    length_dist.validate();
    itt_dist.validate();
    if (!(mean(length_dist) >= 1.0))
        throw ParamError("conversation spec: length mean must be >= 1");
    if (!(mean(itt_dist) > 0.0)) throw ParamError("conversation spec: ITT must be positive");
}

ConversationModel ConversationModel::build(const ConversationSpec& spec) {
    spec.validate();
    ConversationModel m;
    m.spec = spec;

    RandomStream probe = RandomStream(kModelSeed).derive("conversation-model");
    double sum = 0.0, sum_multi = 0.0;
    int n_multi = 0;
    for (int i = 0; i < kModelDraws; ++i) {
        int len = length_from_draw(sample_one(spec.length_dist, probe));
        sum += len;
        if (len >= 2) {
            sum_multi += len;
            n_multi += 1;
        }
    }
    double b = sum / kModelDraws;        // E[L]
    double a = sum_multi / kModelDraws;  // E[L * 1(L >= 2)]
    m.mean_length_given_multi = n_multi > 0 ? sum_multi / n_multi : 1.0;

    // Share of requests in multi-turn conversations when a start is
    // single-turn with probability q: (1-q) a / (q + (1-q) b). Solve for q.
    double p = spec.multi_turn_share;
    double q;
    if (a <= p * b) {
        q = 0.0;  // target share unattainable (or already met drawing as-is)
    } else {
        q = (a - p * b) / (a + p * (1.0 - b));
    }
    m.singleton_prob = std::clamp(q, 0.0, 1.0);
    m.mean_turns = m.singleton_prob + (1.0 - m.singleton_prob) * b;
    return m;
}

double ConversationModel::expected_turns_truncated(double horizon) const {
    if (!(horizon > 0.0)) throw ParamError("expected_turns_truncated: horizon must be positive");
    RandomStream probe = RandomStream(kModelSeed).derive("conversation-truncation");
    double total = 0.0;
    const int trials = 4096;
    for (int i = 0; i < trials; ++i) {
        double start = probe.next_uniform() * horizon;
        int len = draw_length(probe);
        double t = start;
        int turns = 1;
        for (int k = 1; k < len; ++k) {
            t += sample_one(spec.itt_dist, probe);
            if (t >= horizon) break;
            turns += 1;
        }
        total += turns;
    }
    return total / trials;
}

int ConversationModel::draw_length(RandomStream& stream) const {
    if (stream.next_uniform() < singleton_prob) return 1;
    return length_from_draw(sample_one(spec.length_dist, stream));
}

std::vector<Conversation> sample_conversations(const ConversationSpec& spec,
                                               const TimestampStream& starts,
                                               const DataSampler& sampler, RandomStream& stream,
                                               const std::string& id_prefix) {
    ConversationModel model = ConversationModel::build(spec);
    double horizon = starts.horizon > 0.0 ? starts.horizon
                                          : std::numeric_limits<double>::infinity();

    std::vector<Conversation> out;
    out.reserve(starts.timestamps.size());
    for (std::size_t i = 0; i < starts.timestamps.size(); ++i) {
        RandomStream cstream = stream.derive(i);
        Conversation conv;
        conv.conversation_id = id_prefix + "-" + std::to_string(i);

        int len = model.draw_length(cstream);
        double t = starts.timestamps[i];
        std::int64_t history = 0;
        for (int k = 1; k <= len; ++k) {
            if (k > 1) {
                t += sample_one(spec.itt_dist, cstream);
                if (t >= horizon) break;  // later turns fall outside the horizon
            }
            RequestData fresh = sampler(cstream);
            std::int64_t fresh_input = fresh.input_tokens;
            fresh.input_tokens = fresh_input + history;
            history += fresh_input + fresh.output_tokens;
            conv.turns.push_back({t, std::move(fresh), k});
        }
        if (!conv.turns.empty()) out.push_back(std::move(conv));
    }
    return out;
}

std::vector<Conversation> upsample_itt(const std::vector<Conversation>& conversations,
                                       double factor, RandomStream& stream) {
    if (!(factor >= 1.0)) throw ParamError("upsample_itt: factor must be >= 1");
    if (conversations.empty() || factor == 1.0) return conversations;

    double max_start = 0.0;
    for (const auto& c : conversations) max_start = std::max(max_start, c.turns.front().arrival);
    double tile_width = max_start / factor;

    auto full_tiles = static_cast<int>(std::floor(factor));
    double frac = factor - full_tiles;

    std::vector<Conversation> out;
    out.reserve(static_cast<std::size_t>(std::ceil(conversations.size() * factor)));
    for (int tile = 0; tile < full_tiles + (frac > 0.0 ? 1 : 0); ++tile) {
        bool partial = tile == full_tiles;
        for (const auto& c : conversations) {
            if (partial && stream.next_uniform() >= frac) continue;
            double start = c.turns.front().arrival;
            double new_start = start / factor + tile * tile_width;
            Conversation clone = c;
            if (tile > 0) clone.conversation_id += "~" + std::to_string(tile);
            for (auto& turn : clone.turns) turn.arrival = new_start + (turn.arrival - start);
            out.push_back(std::move(clone));
        }
    }
    return out;
}

TimestampStream upsample_naive(const TimestampStream& requests, double factor) {
    if (!(factor >= 1.0)) throw ParamError("upsample_naive: factor must be >= 1");
    TimestampStream out;
    out.horizon = requests.horizon / factor;
    out.timestamps.reserve(requests.timestamps.size());
    for (double t : requests.timestamps) out.timestamps.push_back(t / factor);
    return out;
}

std::vector<FlatRequest> flatten(const std::vector<Conversation>& conversations) {
    std::vector<FlatRequest> out;
    for (const auto& c : conversations) {
        for (const auto& turn : c.turns) {
            out.push_back({turn.arrival, c.conversation_id, turn.turn_index, turn.data});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const FlatRequest& a, const FlatRequest& b) {
        if (a.arrival != b.arrival) return a.arrival < b.arrival;
        if (a.conversation_id != b.conversation_id) return a.conversation_id < b.conversation_id;
        return a.turn_index < b.turn_index;
    });
    return out;
}

nlohmann::json to_json(const ConversationSpec& spec) {
    return nlohmann::json{{"multi_turn_share", spec.multi_turn_share},
                          {"length", to_json(spec.length_dist)},
                          {"itt", to_json(spec.itt_dist)}};
}

ConversationSpec conversation_spec_from_json(const nlohmann::json& j) {
    ConversationSpec s;
    s.multi_turn_share = j.at("multi_turn_share").get<double>();
    s.length_dist = spec_from_json(j.at("length"));
    s.itt_dist = spec_from_json(j.at("itt"));
    s.validate();
    return s;
}

}  // namespace workgen
