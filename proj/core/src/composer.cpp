#include "workgen/composer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "workgen/error.hpp"
#include "workgen/fit.hpp"
#include "workgen/gof.hpp"

namespace workgen {
namespace {

// Piecewise-constant product of the client shape (normalized to mean 1 over
// the horizon), the optional global shape, and the client base rate. The
// result is renormalized so its mean over [0, horizon) is exactly base_rate.
RateProfile effective_profile(const RateProfile& shape, double base_rate, double horizon,
                              const RateProfile* global_shape) {
    if (global_shape == nullptr &&
        shape.interpolation == RateProfile::Interpolation::piecewise_constant &&
        shape.period == 0.0) {
        RateProfile out = shape;
        double scale = base_rate / shape.mean_rate(horizon);
        for (auto& b : out.breakpoints) b.rate *= scale;
        return out;
    }
    RateProfile out;
    out.interpolation = RateProfile::Interpolation::piecewise_constant;
    const double step = 60.0;
    double integral = 0.0;
    for (double t = 0.0; t < horizon; t += step) {
        double t1 = std::min(t + step, horizon);
        double mid = 0.5 * (t + t1);
        double r = shape.rate_at(mid);
        if (global_shape) r *= global_shape->rate_at(mid);
        out.breakpoints.push_back({t, r});
        integral += r * (t1 - t);
    }
    double mean = integral / horizon;
    double scale = mean > 0.0 ? base_rate / mean : 0.0;
    for (auto& b : out.breakpoints) b.rate *= scale;
    return out;
}

std::vector<RequestRecord> generate_client_records(const ClientProfile& client,
                                                   const WorkloadSpec& spec,
                                                   const RateProfile* global_shape,
                                                   std::uint64_t master_seed) {
    RandomStream root = RandomStream(master_seed).derive(client.client_id);
    RandomStream arrival_stream = root.derive("arrival");
    RandomStream data_stream = root.derive("data");
    RandomStream conv_stream = root.derive("conversation");
    SampleOptions opts{spec.output_cap};

    std::vector<RequestRecord> records;
    if (client.base_rate <= 0.0) return records;

    if (client.conversation) {
        ConversationModel model = ConversationModel::build(*client.conversation);
        double turns = model.expected_turns_truncated(spec.horizon);
        RateProfile start_profile = effective_profile(
            client.rate_profile, client.base_rate / std::max(turns, 1e-12), spec.horizon,
            global_shape);
        TimestampStream starts =
            modulate(client.arrival, start_profile, spec.horizon, arrival_stream);
        auto conversations = sample_conversations(
            *client.conversation, starts,
            [&](RandomStream& s) { return sample_data(client.data, s, opts); }, conv_stream,
            client.client_id);
        auto flat = flatten(conversations);
        records.reserve(flat.size());
        for (std::size_t i = 0; i < flat.size(); ++i) {
            RequestRecord r;
            r.timestamp = flat[i].arrival;
            r.client_id = client.client_id;
            r.conversation_id = flat[i].conversation_id;
            r.turn = flat[i].turn_index;
            r.sequence = i;
            r.input_tokens = flat[i].data.input_tokens;
            r.output_tokens = flat[i].data.output_tokens;
            if (client.category == Category::reasoning) {
                r.reason_tokens = flat[i].data.reason_tokens;
                r.answer_tokens = flat[i].data.answer_tokens;
            }
            r.modal_items = flat[i].data.modal_items;
            records.push_back(std::move(r));
        }
        return records;
    }

    RateProfile profile =
        effective_profile(client.rate_profile, client.base_rate, spec.horizon, global_shape);
    TimestampStream ts = modulate(client.arrival, profile, spec.horizon, arrival_stream);
    records.reserve(ts.timestamps.size());
    for (std::size_t i = 0; i < ts.timestamps.size(); ++i) {
        RequestData data = sample_data(client.data, data_stream, opts);
        RequestRecord r;
        r.timestamp = ts.timestamps[i];
        r.client_id = client.client_id;
        r.sequence = i;
        r.input_tokens = data.input_tokens;
        r.output_tokens = data.output_tokens;
        if (client.category == Category::reasoning) {
            r.reason_tokens = data.reason_tokens;
            r.answer_tokens = data.answer_tokens;
        }
        r.modal_items = std::move(data.modal_items);
        records.push_back(std::move(r));
    }
    return records;
}

nlohmann::json spec_echo_json(const WorkloadSpec& spec) {
    nlohmann::json j{{"n_clients", spec.n_clients}};
    if (!spec.pool_path.empty()) j["pool"] = spec.pool_path;
    if (const double* r = std::get_if<double>(&spec.total_rate)) {
        j["total_rate"] = *r;
    } else {
        j["total_rate_profile"] = to_json(std::get<RateProfile>(spec.total_rate));
    }
    return j;
}

}  // namespace

Workload compose(const WorkloadSpec& spec, const ClientPool& pool) {
    if (!(spec.horizon > 0.0)) throw ParamError("compose: horizon must be positive");
    if (spec.n_clients < 1) throw ParamError("compose: need at least one client");
    if (pool.category != spec.category)
        throw PoolError("compose: pool category does not match the requested category");

    double total_mean_rate;
    const RateProfile* global_shape = nullptr;
    if (const double* r = std::get_if<double>(&spec.total_rate)) {
        total_mean_rate = *r;
    } else {
        global_shape = &std::get<RateProfile>(spec.total_rate);
        global_shape->validate();
        total_mean_rate = global_shape->mean_rate(spec.horizon);
    }
    if (!(total_mean_rate > 0.0)) throw ParamError("compose: total rate must be positive");

    auto clients = generate_clients(pool, spec.n_clients, total_mean_rate, spec.seed);

    unsigned n_threads = spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                                          : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(clients.size()));

    std::vector<std::vector<RequestRecord>> slots(clients.size());
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < clients.size(); ++i) {
            slots[i] = generate_client_records(clients[i], spec, global_shape, spec.seed);
        }
    } else {
        std::vector<std::thread> workers;
        std::atomic<std::size_t> next{0};
        for (unsigned t = 0; t < n_threads; ++t) {
            workers.emplace_back([&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= clients.size()) return;
                    slots[i] = generate_client_records(clients[i], spec, global_shape, spec.seed);
                }
            });
        }
        for (auto& w : workers) w.join();
    }

    Workload out;
    std::size_t total = 0;
    for (const auto& s : slots) total += s.size();
    out.records.reserve(total);
    for (auto& s : slots) {
        std::move(s.begin(), s.end(), std::back_inserter(out.records));
    }
    std::sort(out.records.begin(), out.records.end(),
              [](const RequestRecord& a, const RequestRecord& b) {
                  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                  if (a.client_id != b.client_id) return a.client_id < b.client_id;
                  return a.sequence < b.sequence;
              });

    out.meta.version = kWorkloadVersion;
    out.meta.seed = spec.seed;
    out.meta.horizon = spec.horizon;
    out.meta.category = spec.category;
    out.meta.spec_echo = spec_echo_json(spec);
    return out;
}

Workload compose(const WorkloadSpec& spec) {
    return compose(spec, load_pool(spec.pool_path));
}

void serialize(const Workload& workload, std::ostream& out) {
    nlohmann::ordered_json meta;
    meta["version"] = workload.meta.version;
    meta["seed"] = workload.meta.seed;
    meta["horizon"] = workload.meta.horizon;
    meta["category"] = category_name(workload.meta.category);
    if (!workload.meta.spec_echo.is_null()) meta["spec"] = workload.meta.spec_echo;
    out << meta.dump() << "\n";

    for (const auto& r : workload.records) {
        nlohmann::ordered_json j;
        j["ts"] = r.timestamp;
        j["client"] = r.client_id;
        if (r.conversation_id) j["conv"] = *r.conversation_id;
        if (r.turn) j["turn"] = *r.turn;
        j["in"] = r.input_tokens;
        j["out"] = r.output_tokens;
        if (r.reason_tokens) j["reason"] = *r.reason_tokens;
        if (r.answer_tokens) j["answer"] = *r.answer_tokens;
        if (!r.modal_items.empty()) {
            nlohmann::ordered_json modal = nlohmann::ordered_json::array();
            for (const auto& item : r.modal_items) {
                modal.push_back({{"m", modality_name(item.modality)}, {"tok", item.tokens}});
            }
            j["modal"] = modal;
        }
        out << j.dump() << "\n";
    }
}

void serialize(const Workload& workload, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("serialize: cannot open '" + path + "' for writing");
    serialize(workload, out);
}

Workload deserialize(std::istream& in) {
    Workload w;
    std::string line;
    std::size_t line_no = 0;
    std::unordered_map<std::string, std::uint64_t> sequences;

    while (std::getline(in, line)) {
        line_no += 1;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("workload: invalid JSON: ") + e.what(), line_no);
        }
        try {
            if (line_no == 1) {
                w.meta.version = j.at("version").get<std::string>();
                w.meta.seed = j.at("seed").get<std::uint64_t>();
                w.meta.horizon = j.at("horizon").get<double>();
                w.meta.category = category_from_name(j.at("category").get<std::string>());
                if (j.contains("spec")) w.meta.spec_echo = j.at("spec");
                continue;
            }
            RequestRecord r;
            r.timestamp = j.at("ts").get<double>();
            r.client_id = j.at("client").get<std::string>();
            if (j.contains("conv") && !j.at("conv").is_null())
                r.conversation_id = j.at("conv").get<std::string>();
            if (j.contains("turn") && !j.at("turn").is_null()) r.turn = j.at("turn").get<int>();
            r.input_tokens = j.at("in").get<std::int64_t>();
            r.output_tokens = j.at("out").get<std::int64_t>();
            if (j.contains("reason") && !j.at("reason").is_null())
                r.reason_tokens = j.at("reason").get<std::int64_t>();
            if (j.contains("answer") && !j.at("answer").is_null())
                r.answer_tokens = j.at("answer").get<std::int64_t>();
            if (j.contains("modal") && !j.at("modal").is_null()) {
                for (const auto& item : j.at("modal")) {
                    r.modal_items.push_back({modality_from_name(item.at("m").get<std::string>()),
                                             item.at("tok").get<std::int64_t>()});
                }
            }
            if (!w.records.empty() && r.timestamp < w.records.back().timestamp) {
                throw ParseError("workload: records not sorted by timestamp", line_no);
            }
            r.sequence = sequences[r.client_id]++;
            w.records.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("workload: bad record: ") + e.what(), line_no);
        }
    }
    if (line_no == 0) throw ParseError("workload: empty file (missing metadata line)", 1);
    return w;
}

Workload deserialize(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("deserialize: cannot open '" + path + "'");
    return deserialize(in);
}

std::vector<double> request_iats(const Workload& workload) {
    std::vector<double> iats;
    if (workload.records.size() < 2) return iats;
    iats.reserve(workload.records.size() - 1);
    for (std::size_t i = 1; i < workload.records.size(); ++i) {
        double d = workload.records[i].timestamp - workload.records[i - 1].timestamp;
        if (d > 0.0) iats.push_back(d);
    }
    return iats;
}

namespace {

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i);
        return r;
    };
    std::vector<double> ra = ranks(a), rb = ranks(b);
    double n = static_cast<double>(a.size());
    double ma = (n - 1.0) / 2.0;
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - ma);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - ma) * (rb[i] - ma);
    }
    if (da <= 0.0 || db <= 0.0) return 0.0;
    return num / std::sqrt(da * db);
}

DistributionSpec fit_length_dist(std::vector<double>& values) {
    if (values.size() >= 200) {
        try {
            return fit_body_tail(values, 0.95);
        } catch (const Error&) {
            // fall through to empirical resampling
        }
    }
    return DistributionSpec::empirical(values);
}

}  // namespace

Workload naive_baseline(const Workload& reference, std::uint64_t seed) {
    if (reference.records.size() < 10)
        throw ParamError("naive_baseline: reference workload too small");
    double horizon = reference.meta.horizon > 0.0 ? reference.meta.horizon
                                                  : reference.records.back().timestamp + 1.0;

    // Arrival: 5-minute piecewise rate plus one global CV as a Gamma renewal.
    const double window = 300.0;
    RateProfile profile;
    auto n_windows = static_cast<std::size_t>(std::ceil(horizon / window));
    std::vector<std::size_t> counts(n_windows, 0);
    for (const auto& r : reference.records) {
        auto w = static_cast<std::size_t>(r.timestamp / window);
        if (w < n_windows) counts[w] += 1;
    }
    for (std::size_t w = 0; w < n_windows; ++w) {
        double len = std::min(window, horizon - static_cast<double>(w) * window);
        profile.breakpoints.push_back(
            {static_cast<double>(w) * window, static_cast<double>(counts[w]) / len});
    }

    auto iats = request_iats(reference);
    double iat_cv = iats.size() >= 2 ? cv(iats) : 1.0;
    ArrivalSpec arrival;
    if (std::fabs(iat_cv - 1.0) < 1e-6) {
        arrival = ArrivalSpec::exponential();
    } else {
        arrival.iat_family = DistributionSpec::gamma(1.0 / (iat_cv * iat_cv), 1.0);
    }

    // Pooled data fits, category by category.
    std::vector<double> inputs, outputs;
    inputs.reserve(reference.records.size());
    outputs.reserve(reference.records.size());
    for (const auto& r : reference.records) {
        inputs.push_back(static_cast<double>(r.input_tokens));
        outputs.push_back(static_cast<double>(r.output_tokens));
    }
    DistributionSpec input_fit = fit_length_dist(inputs);
    DistributionSpec output_fit = DistributionSpec::exponential(
        1.0 / (std::accumulate(outputs.begin(), outputs.end(), 0.0) / outputs.size()));
    double corr = std::clamp(spearman(inputs, outputs), 0.0, 1.0);

    ClientProfile naive;
    naive.client_id = "naive";
    naive.category = reference.meta.category;
    naive.arrival = arrival;
    naive.rate_profile = profile;

    switch (reference.meta.category) {
        case Category::language:
            naive.data = LanguageDataSpec{input_fit, output_fit, corr};
            break;
        case Category::multimodal: {
            MultimodalDataSpec mm;
            mm.text = LanguageDataSpec{input_fit, output_fit, corr};
            std::map<Modality, std::vector<double>> counts_by, tokens_by;
            for (const auto& r : reference.records) {
                std::map<Modality, double> per_request;
                for (const auto& item : r.modal_items) {
                    per_request[item.modality] += 1.0;
                    tokens_by[item.modality].push_back(static_cast<double>(item.tokens));
                }
                for (auto& [mod, n] : per_request) counts_by[mod].push_back(n);
            }
            for (auto& [mod, tokens] : tokens_by) {
                // Count lists omit requests with zero items of the modality.
                auto& c = counts_by[mod];
                std::size_t zeros = reference.records.size() - c.size();
                c.insert(c.end(), zeros, 0.0);
                mm.modalities.push_back({mod, DistributionSpec::empirical(c),
                                         DistributionSpec::empirical(tokens)});
            }
            naive.data = std::move(mm);
            break;
        }
        case Category::reasoning: {
            ReasoningDataSpec rs;
            rs.input = input_fit;
            rs.output = output_fit;
            std::vector<double> fractions, reasons, answers;
            for (const auto& r : reference.records) {
                if (r.reason_tokens && r.answer_tokens && r.output_tokens >= 2) {
                    fractions.push_back(static_cast<double>(*r.answer_tokens) /
                                        static_cast<double>(r.output_tokens));
                    reasons.push_back(static_cast<double>(*r.reason_tokens));
                    answers.push_back(static_cast<double>(*r.answer_tokens));
                }
            }
            rs.ratio_mix = fractions.empty() ? DistributionSpec::empirical({0.5})
                                             : DistributionSpec::empirical(fractions);
            rs.reason_answer_corr =
                reasons.size() >= 2 ? std::clamp(spearman(reasons, answers), 0.0, 1.0) : 0.0;
            naive.data = std::move(rs);
            break;
        }
    }

    ClientPool pool;
    pool.category = reference.meta.category;
    pool.profiles.push_back(std::move(naive));
    pool.skew.form = SkewSpec::Form::explicit_shares;
    pool.skew.shares = {1.0};

    WorkloadSpec spec;
    spec.n_clients = 1;
    spec.total_rate = static_cast<double>(reference.records.size()) / horizon;
    spec.horizon = horizon;
    spec.category = reference.meta.category;
    spec.seed = seed;
    Workload out = compose(spec, pool);
    out.meta.spec_echo["baseline"] = "naive";
    return out;
}

}  // namespace workgen
