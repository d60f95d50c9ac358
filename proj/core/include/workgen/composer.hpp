#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "workgen/clientpool.hpp"

namespace workgen {

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr const char* kWorkloadVersion = "0.1.0";

struct WorkloadSpec {
    std::string pool_path;
    std::size_t n_clients = 1;
    std::variant<double, RateProfile> total_rate = 1.0;  // scalar or global shape
    double horizon = 0.0;  // seconds
    Category category = Category::language;
    std::uint64_t seed = kDefaultSeed;
    int threads = 0;  // 0 = hardware concurrency
    std::int64_t output_cap = 32768;
};

struct RequestRecord {
    double timestamp = 0.0;
    std::string client_id;
    std::optional<std::string> conversation_id;
    std::optional<int> turn;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::optional<std::int64_t> reason_tokens;
    std::optional<std::int64_t> answer_tokens;
    std::vector<ModalItem> modal_items;
    std::uint64_t sequence = 0;  // per-client ordinal, breaks timestamp ties
};

struct WorkloadMeta {
    std::string version = kWorkloadVersion;
    std::uint64_t seed = kDefaultSeed;
    double horizon = 0.0;
    Category category = Category::language;
    nlohmann::json spec_echo;  // generation parameters, informational
};

struct Workload {
    std::vector<RequestRecord> records;  // sorted by (timestamp, client_id, sequence)
    WorkloadMeta meta;
};

/// Generate a workload: clients from the pool, per-client timestamps through
/// their rate profiles, per-request data, conversation expansion where
/// configured, and a deterministic merge. Reproducible byte-for-byte from
/// (spec, seed) at any thread count.
Workload compose(const WorkloadSpec& spec, const ClientPool& pool);
Workload compose(const WorkloadSpec& spec);  // loads spec.pool_path

/// Line-delimited serialization: one metadata object, then one record per
/// line with fields ts, client, conv, turn, in, out, reason, answer, modal.
void serialize(const Workload& workload, std::ostream& out);
void serialize(const Workload& workload, const std::string& path);
Workload deserialize(std::istream& in);
Workload deserialize(const std::string& path);

/// Global-fit comparator: one arrival process (5-minute piecewise rate plus a
/// single Gamma-renewal CV) and one pooled data distribution fitted to the
/// whole reference, sampled as a single client.
Workload naive_baseline(const Workload& reference, std::uint64_t seed);

/// Inter-arrival times of the merged request stream (zero gaps from
/// simultaneous arrivals are dropped).
std::vector<double> request_iats(const Workload& workload);

}  // namespace workgen
