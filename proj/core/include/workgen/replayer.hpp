#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "workgen/composer.hpp"

namespace workgen {

struct SloTarget {
    double ttft_p99 = 2.25;  // seconds
    double tbt_p99 = 0.5;    // seconds
};

struct ReplayConfig {
    std::string endpoint;        // e.g. http://127.0.0.1:8080
    double speedup = 1.0;        // scheduled_ts / speedup; 0 = as fast as possible
    int max_in_flight = 64;
    double timeout_seconds = 30.0;
    std::optional<SloTarget> slo;
    std::string model = "mock";  // model name placed on the wire
};

enum class RequestStatus { ok, timeout, error };

struct RequestMetrics {
    std::size_t record_index = 0;
    std::string client_id;
    double scheduled_ts = 0.0;        // seconds from replay start
    double actual_dispatch_ts = 0.0;  // seconds from replay start
    double ttft = 0.0;                // first chunk - dispatch
    std::vector<double> tbt_samples;  // gaps between subsequent chunks
    double e2e = 0.0;
    RequestStatus status = RequestStatus::error;
    bool gated = false;  // dispatch waited on the previous conversation turn
};

struct ReplaySummary {
    std::size_t total = 0;
    std::size_t ok = 0;
    std::size_t timeouts = 0;
    std::size_t errors = 0;
    double ttft_p50 = 0.0, ttft_p90 = 0.0, ttft_p99 = 0.0;
    // TBT percentiles: p50/p90 pool every inter-chunk gap; p99 is the P99 of
    // per-request P99 gaps so that every request's own tail counts.
    double tbt_p50 = 0.0, tbt_p90 = 0.0, tbt_p99 = 0.0;
    double dispatch_error_p99 = 0.0;  // over non-gated requests
    std::size_t overruns = 0;         // dispatch error > 100 ms
    std::optional<bool> slo_pass;
};

struct ReplayResult {
    std::vector<RequestMetrics> metrics;
    ReplaySummary summary;
};

/// Dispatch every record at scheduled_ts/speedup against a streaming
/// chat-completions endpoint, measuring TTFT, inter-chunk gaps, and e2e.
/// Conversation turns never dispatch before the previous turn completed.
ReplayResult replay(const Workload& workload, const ReplayConfig& config);

ReplaySummary summarize_metrics(const std::vector<RequestMetrics>& metrics,
                                const std::optional<SloTarget>& slo);

struct SloProbe {
    double rate = 0.0;
    double ttft_p99 = 0.0;
    double tbt_p99 = 0.0;
    bool pass = false;
};

struct SloSearchResult {
    bool feasible = false;
    double max_rate = 0.0;  // largest probed rate meeting both SLOs
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    std::vector<SloProbe> probes;
};

using WorkloadFactory = std::function<Workload(double total_rate)>;

/// Bisection over the total rate: regenerates (or rescales) the workload per
/// probe and returns the largest probed rate meeting both P99 SLOs.
SloSearchResult slo_search(const WorkloadFactory& factory, const ReplayConfig& config,
                           const SloTarget& slo, double rate_lo, double rate_hi,
                           int max_probes = 8);

nlohmann::json to_json(const ReplaySummary& summary);
nlohmann::json to_json(const RequestMetrics& metrics);
nlohmann::json to_json(const SloSearchResult& result);

}  // namespace workgen
