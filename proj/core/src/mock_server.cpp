#include "workgen/mock_server.hpp"

#include <atomic>
#include <chrono>
#include <semaphore>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "workgen/error.hpp"
#include "workgen/random.hpp"

namespace workgen {
namespace {

using Clock = std::chrono::steady_clock;

std::int64_t count_words(const std::string& text) {
    std::int64_t n = 0;
    bool in_word = false;
    for (char c : text) {
        bool ws = c == ' ' || c == '\n' || c == '\t' || c == '\r';
        if (!ws && !in_word) n += 1;
        in_word = !ws;
    }
    return n;
}

const std::string kChunkPayload =
    "data: {\"choices\":[{\"index\":0,\"delta\":{\"content\":\"tok \"}}]}\n\n";
const std::string kDoneMarker = "data: [DONE]\n\n";

}  // namespace

struct MockServer::Impl {
    MockLatencyModel model;
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::unique_ptr<std::counting_semaphore<>> slots;
    std::atomic<std::uint64_t> request_counter{0};

    double jittered(double base, RandomStream& stream) const {
        if (model.jitter <= 0.0) return base;
        return base + stream.next_uniform() * model.jitter;
    }
};

MockServer::MockServer(MockLatencyModel model, int port) : impl_(std::make_unique<Impl>()) {
    impl_->model = model;
    if (model.max_concurrency > 0) {
        impl_->slots = std::make_unique<std::counting_semaphore<>>(model.max_concurrency);
    }

    impl_->server.set_tcp_nodelay(true);
    impl_->server.new_task_queue = [] { return new httplib::ThreadPool(96); };

    impl_->server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("ok", "text/plain");
    });

    Impl* impl = impl_.get();
    impl_->server.Post("/v1/chat/completions", [impl](const httplib::Request& req,
                                                      httplib::Response& res) {
        nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.contains("messages") || !body["messages"].is_array()) {
            res.status = 400;
            res.set_content("{\"error\":\"malformed request\"}", "application/json");
            return;
        }
        std::int64_t input_tokens = 0;
        for (const auto& m : body["messages"]) {
            if (m.contains("content") && m["content"].is_string()) {
                input_tokens += count_words(m["content"].get<std::string>());
            }
        }
        auto max_tokens = body.value("max_tokens", std::int64_t{16});
        if (max_tokens < 1) max_tokens = 1;
        bool stream = body.value("stream", false);
        double prefill = impl->model.prefill_per_1k * static_cast<double>(input_tokens) / 1000.0;
        std::uint64_t rid = impl->request_counter.fetch_add(1);

        if (!stream) {
            if (impl->slots) impl->slots->acquire();
            RandomStream rng = RandomStream(rid).derive("mock-jitter");
            double total = impl->jittered(prefill, rng) +
                           static_cast<double>(max_tokens - 1) * impl->model.per_token;
            std::this_thread::sleep_for(std::chrono::duration<double>(total));
            if (impl->slots) impl->slots->release();
            nlohmann::json out{{"choices",
                                {{{"index", 0},
                                  {"message", {{"role", "assistant"}, {"content", "done"}}}}}},
                               {"usage",
                                {{"prompt_tokens", input_tokens},
                                 {"completion_tokens", max_tokens}}}};
            res.set_content(out.dump(), "application/json");
            return;
        }

        res.set_chunked_content_provider(
            "text/event-stream",
            [impl, prefill, max_tokens, rid](std::size_t, httplib::DataSink& sink) {
                if (impl->slots) impl->slots->acquire();
                RandomStream rng = RandomStream(rid).derive("mock-jitter");

                std::this_thread::sleep_for(
                    std::chrono::duration<double>(impl->jittered(prefill, rng)));
                auto next = Clock::now();
                bool ok = true;
                for (std::int64_t i = 0; ok && i < max_tokens; ++i) {
                    if (i > 0) {
                        next += std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(
                                impl->jittered(impl->model.per_token, rng)));
                        std::this_thread::sleep_until(next);
                    }
                    ok = sink.write(kChunkPayload.data(), kChunkPayload.size());
                }
                if (ok && sink.write(kDoneMarker.data(), kDoneMarker.size())) {
                    sink.done();
                }
                if (impl->slots) impl->slots->release();
                return true;
            });
    });

    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
        if (impl_->port <= 0) throw Error("mock server: failed to bind a port");
    } else {
        if (!impl_->server.bind_to_port("127.0.0.1", port))
            throw Error("mock server: failed to bind port " + std::to_string(port));
        impl_->port = port;
    }
    impl_->thread = std::thread([impl] { impl->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

MockServer::~MockServer() {
    stop();
}

int MockServer::port() const {
    return impl_->port;
}

std::string MockServer::base_url() const {
    return "http://127.0.0.1:" + std::to_string(impl_->port);
}

void MockServer::stop() {
    if (impl_ && impl_->server.is_running()) {
        impl_->server.stop();
    }
    if (impl_ && impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

}  // namespace workgen
