#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "workgen/arrival.hpp"
#include "workgen/datamodel.hpp"
#include "workgen/distribution.hpp"

namespace workgen {

// Multi-turn behavior of one client. `length_dist` models the number of turns
// of multi-turn conversations; `multi_turn_share` is the fraction of requests
// that belong to conversations with at least two turns, realized by mixing in
// single-turn conversations at the implied probability.
struct ConversationSpec {
    double multi_turn_share = 0.0;
    DistributionSpec length_dist = DistributionSpec::empirical({2.0});
    DistributionSpec itt_dist = DistributionSpec::log_normal(5.6, 1.0);  // seconds

    void validate() const;
};

struct Turn {
    double arrival = 0.0;
    RequestData data;
    int turn_index = 1;  // 1-based, contiguous
};

struct Conversation {
    std::string conversation_id;
    std::vector<Turn> turns;
};

// Per-spec derived quantities, estimated once by a fixed-seed Monte-Carlo so
// generation and rate accounting agree exactly.
struct ConversationModel {
    ConversationSpec spec;
    double singleton_prob = 1.0;     // P(conversation start is single-turn)
    double mean_length_given_multi = 1.0;
    double mean_turns = 1.0;         // expected turns per start, no truncation

    static ConversationModel build(const ConversationSpec& spec);

    /// Expected turns per start when turns past `horizon` are dropped and
    /// starts are uniform over [0, horizon).
    double expected_turns_truncated(double horizon) const;

    /// Draw the number of turns for one conversation.
    int draw_length(RandomStream& stream) const;
};

using DataSampler = std::function<RequestData(RandomStream&)>;

/// Expand conversation start times into full conversations: lengths from the
/// spec, turn arrivals chained by ITT draws (truncated at the stream horizon),
/// and each turn's input augmented with the accumulated history
/// (input_n = fresh_n + sum_{j<n} (fresh_j + output_j)).
std::vector<Conversation> sample_conversations(const ConversationSpec& spec,
                                               const TimestampStream& starts,
                                               const DataSampler& sampler, RandomStream& stream,
                                               const std::string& id_prefix = "conv");

/// Scale the conversation arrival rate by `factor` while leaving every
/// within-conversation ITT untouched: start gaps compress by the factor and
/// the conversation sequence tiles with fresh ids to fill the original span.
std::vector<Conversation> upsample_itt(const std::vector<Conversation>& conversations,
                                       double factor, RandomStream& stream);

/// Conversation-agnostic comparator: every IAT divided by the factor.
TimestampStream upsample_naive(const TimestampStream& requests, double factor);

struct FlatRequest {
    double arrival = 0.0;
    std::string conversation_id;
    int turn_index = 1;
    RequestData data;
};

/// Time-sorted merge of all turns with conversation linkage.
std::vector<FlatRequest> flatten(const std::vector<Conversation>& conversations);

nlohmann::json to_json(const ConversationSpec& spec);
ConversationSpec conversation_spec_from_json(const nlohmann::json& j);

}  // namespace workgen
