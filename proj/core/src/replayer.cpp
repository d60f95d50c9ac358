#include "workgen/replayer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string_view>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "workgen/error.hpp"

namespace workgen {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

// Completion ordering for turns of one conversation.
struct Gate {
    std::mutex mu;
    std::condition_variable cv;
    int done_turn = 0;

    void wait_for_turn(int turn, double timeout_s) {
        std::unique_lock<std::mutex> lock(mu);
        cv.wait_for(lock, std::chrono::duration<double>(timeout_s),
                    [&] { return done_turn >= turn; });
    }
    void complete(int turn) {
        {
            std::lock_guard<std::mutex> lock(mu);
            done_turn = std::max(done_turn, turn);
        }
        cv.notify_all();
    }
};

std::string filler_prompt(std::int64_t tokens) {
    std::string s;
    s.reserve(static_cast<std::size_t>(tokens) * 4);
    for (std::int64_t i = 0; i < tokens; ++i) s += "tok ";
    if (!s.empty()) s.pop_back();
    return s;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    auto idx = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(values.size())));
    if (idx > 0) idx -= 1;
    if (idx >= values.size()) idx = values.size() - 1;
    return values[idx];
}

}  // namespace

ReplayResult replay(const Workload& workload, const ReplayConfig& config) {
    ReplayResult result;
    result.metrics.resize(workload.records.size());
    if (workload.records.empty()) {
        result.summary = summarize_metrics(result.metrics, config.slo);
        return result;
    }
    if (config.endpoint.empty()) throw ParamError("replay: endpoint must be set");
    if (!(config.timeout_seconds > 0.0)) throw ParamError("replay: timeout must be positive");

    // One gate per multi-turn conversation.
    std::unordered_map<std::string, std::shared_ptr<Gate>> gates;
    for (const auto& r : workload.records) {
        if (r.conversation_id && r.turn && *r.turn > 1) {
            auto& g = gates[*r.conversation_id];
            if (!g) g = std::make_shared<Gate>();
        }
    }

    const int n_workers = std::clamp(config.max_in_flight, 1, 256);
    const auto start = Clock::now() + std::chrono::milliseconds(200);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        httplib::Client cli(config.endpoint);
        cli.set_tcp_nodelay(true);
        cli.set_connection_timeout(std::chrono::duration<double>(config.timeout_seconds));
        cli.set_read_timeout(std::chrono::duration<double>(config.timeout_seconds));
        cli.set_keep_alive(true);

        for (;;) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= workload.records.size()) return;
            const RequestRecord& rec = workload.records[idx];
            RequestMetrics& m = result.metrics[idx];
            m.record_index = idx;
            m.client_id = rec.client_id;
            m.scheduled_ts =
                config.speedup > 0.0 ? rec.timestamp / config.speedup : 0.0;

            auto target = start + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(m.scheduled_ts));
            std::this_thread::sleep_until(target);

            if (rec.conversation_id && rec.turn && *rec.turn > 1) {
                auto it = gates.find(*rec.conversation_id);
                if (it != gates.end()) {
                    m.gated = true;
                    it->second->wait_for_turn(*rec.turn - 1, config.timeout_seconds);
                }
            }

            nlohmann::json body{
                {"model", config.model},
                {"messages",
                 nlohmann::json::array(
                     {{{"role", "user"}, {"content", filler_prompt(rec.input_tokens)}}})},
                {"max_tokens", rec.output_tokens},
                {"stream", true}};

            auto dispatch = Clock::now();
            m.actual_dispatch_ts = seconds_between(start, dispatch);

            std::string buffer;
            std::size_t scan_pos = 0;
            std::size_t event_count = 0;
            bool first_seen = false;
            Clock::time_point last_event{};

            httplib::Request req;
            req.method = "POST";
            req.path = "/v1/chat/completions";
            req.set_header("Content-Type", "application/json");
            req.body = body.dump();
            req.content_receiver = [&](const char* data, std::size_t len, std::uint64_t,
                                       std::uint64_t) {
                auto now = Clock::now();
                if (!first_seen) {
                    first_seen = true;
                    m.ttft = seconds_between(dispatch, now);
                }
                buffer.append(data, len);
                // Completed SSE events in this read; coalesced events share
                // the read timestamp and contribute zero gaps.
                for (;;) {
                    auto pos = buffer.find("\n\n", scan_pos);
                    if (pos == std::string::npos) break;
                    std::string_view event(buffer.data() + scan_pos, pos - scan_pos);
                    scan_pos = pos + 2;
                    if (event.rfind("data: [DONE]", 0) == 0) continue;
                    event_count += 1;
                    if (event_count > 1) m.tbt_samples.push_back(seconds_between(last_event, now));
                    last_event = now;
                }
                return true;
            };

            auto res = cli.send(req);
            m.e2e = seconds_between(dispatch, Clock::now());
            if (res && res->status == 200) {
                m.status = RequestStatus::ok;
            } else if (res) {
                m.status = RequestStatus::error;
            } else {
                auto err = res.error();
                m.status = (err == httplib::Error::ConnectionTimeout ||
                            err == httplib::Error::Read || err == httplib::Error::Write)
                               ? RequestStatus::timeout
                               : RequestStatus::error;
            }

            if (rec.conversation_id && rec.turn) {
                auto it = gates.find(*rec.conversation_id);
                if (it != gates.end()) it->second->complete(*rec.turn);
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    result.summary = summarize_metrics(result.metrics, config.slo);
    return result;
}

ReplaySummary summarize_metrics(const std::vector<RequestMetrics>& metrics,
                                const std::optional<SloTarget>& slo) {
    ReplaySummary s;
    s.total = metrics.size();

    std::vector<double> ttfts, gaps, per_request_p99, dispatch_errors;
    for (const auto& m : metrics) {
        switch (m.status) {
            case RequestStatus::ok: s.ok += 1; break;
            case RequestStatus::timeout: s.timeouts += 1; break;
            case RequestStatus::error: s.errors += 1; break;
        }
        if (m.status != RequestStatus::ok) continue;
        ttfts.push_back(m.ttft);
        if (!m.tbt_samples.empty()) {
            gaps.insert(gaps.end(), m.tbt_samples.begin(), m.tbt_samples.end());
            per_request_p99.push_back(percentile(m.tbt_samples, 0.99));
        }
        if (!m.gated) {
            double err = m.actual_dispatch_ts - m.scheduled_ts;
            dispatch_errors.push_back(err);
            if (err > 0.1) s.overruns += 1;
        }
    }
    s.ttft_p50 = percentile(ttfts, 0.50);
    s.ttft_p90 = percentile(ttfts, 0.90);
    s.ttft_p99 = percentile(ttfts, 0.99);
    s.tbt_p50 = percentile(gaps, 0.50);
    s.tbt_p90 = percentile(gaps, 0.90);
    s.tbt_p99 = percentile(per_request_p99, 0.99);
    s.dispatch_error_p99 = percentile(dispatch_errors, 0.99);
    if (slo) {
        s.slo_pass = s.total == 0 ||
                     (s.ttft_p99 <= slo->ttft_p99 && s.tbt_p99 <= slo->tbt_p99 &&
                      s.timeouts == 0 && s.errors == 0);
    }
    return s;
}

SloSearchResult slo_search(const WorkloadFactory& factory, const ReplayConfig& config,
                           const SloTarget& slo, double rate_lo, double rate_hi,
                           int max_probes) {
    if (!(rate_lo > 0.0) || !(rate_hi > rate_lo))
        throw ParamError("slo_search: need 0 < rate_lo < rate_hi");

    ReplayConfig probe_config = config;
    probe_config.slo = slo;

    SloSearchResult result;
    result.bracket_lo = rate_lo;
    result.bracket_hi = rate_hi;

    auto probe = [&](double rate) {
        Workload w = factory(rate);
        ReplayResult r = replay(w, probe_config);
        bool pass = r.summary.slo_pass.value_or(false);
        result.probes.push_back({rate, r.summary.ttft_p99, r.summary.tbt_p99, pass});
        return pass;
    };

    if (!probe(rate_lo)) {
        result.feasible = false;  // SLO unmeetable at the minimum rate
        return result;
    }
    result.feasible = true;
    result.max_rate = rate_lo;

    if (probe(rate_hi)) {
        result.max_rate = rate_hi;  // bracket max sustains the SLO
        result.bracket_lo = rate_hi;
        return result;
    }

    double lo = rate_lo, hi = rate_hi;
    for (int i = 2; i < max_probes; ++i) {
        double mid = 0.5 * (lo + hi);
        if (probe(mid)) {
            lo = mid;
            result.max_rate = mid;
        } else {
            hi = mid;
        }
    }
    result.bracket_lo = lo;
    result.bracket_hi = hi;
    return result;
}

nlohmann::json to_json(const ReplaySummary& s) {
    nlohmann::json j{{"total", s.total},
                     {"ok", s.ok},
                     {"timeouts", s.timeouts},
                     {"errors", s.errors},
                     {"ttft_p50", s.ttft_p50},
                     {"ttft_p90", s.ttft_p90},
                     {"ttft_p99", s.ttft_p99},
                     {"tbt_p50", s.tbt_p50},
                     {"tbt_p90", s.tbt_p90},
                     {"tbt_p99", s.tbt_p99},
                     {"dispatch_error_p99", s.dispatch_error_p99},
                     {"overruns", s.overruns}};
    if (s.slo_pass) j["slo_pass"] = *s.slo_pass;
    return j;
}

nlohmann::json to_json(const RequestMetrics& m) {
    const char* status = m.status == RequestStatus::ok
                             ? "ok"
                             : (m.status == RequestStatus::timeout ? "timeout" : "error");
    return nlohmann::json{{"idx", m.record_index},
                          {"client", m.client_id},
                          {"scheduled", m.scheduled_ts},
                          {"dispatched", m.actual_dispatch_ts},
                          {"ttft", m.ttft},
                          {"e2e", m.e2e},
                          {"chunks", m.tbt_samples.size() + 1},
                          {"tbt_p50", percentile(m.tbt_samples, 0.50)},
                          {"tbt_p99", percentile(m.tbt_samples, 0.99)},
                          {"gated", m.gated},
                          {"status", status}};
}

nlohmann::json to_json(const SloSearchResult& r) {
    nlohmann::json probes = nlohmann::json::array();
    for (const auto& p : r.probes) {
        probes.push_back(
            {{"rate", p.rate}, {"ttft_p99", p.ttft_p99}, {"tbt_p99", p.tbt_p99}, {"pass", p.pass}});
    }
    return nlohmann::json{{"feasible", r.feasible},
                          {"max_rate", r.max_rate},
                          {"bracket_lo", r.bracket_lo},
                          {"bracket_hi", r.bracket_hi},
                          {"probes", probes}};
}

}  // namespace workgen
