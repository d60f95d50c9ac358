#pragma once

#include <memory>

namespace workgen {

// Pacing model for the built-in endpoint: queue admission (optional), a
// prefill delay proportional to input tokens, then one streamed chunk per
// output token.
struct MockLatencyModel {
    double prefill_per_1k = 0.05;  // seconds per 1000 input tokens
    double per_token = 0.01;       // seconds between consecutive chunks
    double jitter = 0.0;           // uniform [0, jitter) seconds added per delay
    int max_concurrency = 0;       // 0 = unlimited; N = at most N streams at once
};

// Chat-completions-style mock endpoint for desk-scale replay tests. Serves
// POST /v1/chat/completions with an SSE token stream sized by `max_tokens`,
// plus GET /healthz. Runs on a background thread until stopped or destroyed.
class MockServer {
public:
    explicit MockServer(MockLatencyModel model, int port = 0);  // port 0: pick a free one
    ~MockServer();

    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    int port() const;
    std::string base_url() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace workgen
