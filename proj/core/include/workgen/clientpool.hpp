#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "workgen/arrival.hpp"
#include "workgen/conversation.hpp"
#include "workgen/datamodel.hpp"

namespace workgen {

// How the total rate splits across generated clients. Rank weights follow a
// power law weight(rank) ~ rank^(-exponent); explicit shares list one share
// per generated client and must sum to 1.
struct SkewSpec {
    enum class Form { rank_weights, explicit_shares };

    Form form = Form::rank_weights;
    double exponent = 1.0;
    std::vector<double> shares;

    void validate() const;
    /// Normalized descending shares for n clients.
    std::vector<double> rank_shares(std::size_t n) const;
};

struct ClientProfile {
    std::string client_id;
    Category category = Category::language;
    ArrivalSpec arrival;
    RateProfile rate_profile = RateProfile::constant(1.0);  // shape only; mean-normalized at use
    double base_rate = 0.0;                                 // requests/second
    DataSpec data = LanguageDataSpec{};
    std::optional<ConversationSpec> conversation;

    void validate() const;
};

struct ClientPool {
    Category category = Category::language;
    std::vector<ClientProfile> profiles;  // archetypes, heaviest style first
    SkewSpec skew;

    void validate() const;
};

ClientPool load_pool(const std::string& path);
void save_pool(const ClientPool& pool, const std::string& path);
ClientPool pool_from_json(const nlohmann::json& j);
nlohmann::json pool_to_json(const ClientPool& pool);

/// Instantiate n clients from the pool: profile archetypes are assigned to
/// ranks by seeded per-block shuffles (every pool profile appears once per
/// block of pool-size ranks, duplicated with fresh ids when n exceeds the
/// pool), and base rates follow the skew's rank shares scaled to total_rate.
std::vector<ClientProfile> generate_clients(const ClientPool& pool, std::size_t n_clients,
                                            double total_rate, std::uint64_t seed);

/// Multiply every base rate by one common factor so they sum to total_rate.
void scale_rates(std::vector<ClientProfile>& clients, double total_rate);

/// Rate share held by the top_k clients by base rate.
double skew_share(const std::vector<ClientProfile>& clients, std::size_t top_k);

}  // namespace workgen
