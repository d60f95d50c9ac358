#include "workgen/clientpool.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "workgen/error.hpp"

namespace workgen {

void SkewSpec::validate() const {
    if (form == Form::rank_weights) {
        if (!(exponent > 0.0)) throw ParamError("skew: rank-weight exponent must be positive");
        return;
    }
    if (shares.empty()) throw ParamError("skew: explicit shares must be non-empty");
    double sum = 0.0;
    for (double s : shares) {
        if (s < 0.0) throw ParamError("skew: shares must be nonnegative");
        sum += s;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw ParamError("skew: explicit shares must sum to 1");
}

std::vector<double> SkewSpec::rank_shares(std::size_t n) const {
    validate();
    if (form == Form::explicit_shares) {
        if (shares.size() != n)
            throw ParamError("skew: explicit shares count must equal the client count");
        std::vector<double> sorted = shares;
        std::sort(sorted.rbegin(), sorted.rend());
        return sorted;
    }
    std::vector<double> w(n);
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        w[r] = std::pow(static_cast<double>(r + 1), -exponent);
        sum += w[r];
    }
    for (double& x : w) x /= sum;
    return w;
}

void ClientProfile::validate() const {
    if (client_id.empty()) throw ParamError("client profile: id must be non-empty");
    if (base_rate < 0.0) throw ParamError("client profile: base_rate must be >= 0");
    arrival.validate();
    rate_profile.validate();
    workgen::validate(data);
    if (category_of(data) != category)
        throw PoolError("client profile '" + client_id + "': data spec does not match category");
    if (conversation) conversation->validate();
}

void ClientPool::validate() const {
    if (profiles.empty()) throw PoolError("client pool: no profiles");
    skew.validate();
    std::set<std::string> ids;
    for (const auto& p : profiles) {
        p.validate();
        if (p.category != category)
            throw PoolError("client pool: profile '" + p.client_id + "' category mismatch");
        if (!ids.insert(p.client_id).second)
            throw PoolError("client pool: duplicate client id '" + p.client_id + "'");
    }
}

std::vector<ClientProfile> generate_clients(const ClientPool& pool, std::size_t n_clients,
                                            double total_rate, std::uint64_t seed) {
    pool.validate();
    if (n_clients < 1) throw ParamError("generate_clients: need at least one client");
    if (!(total_rate > 0.0)) throw ParamError("generate_clients: total_rate must be positive");

    std::vector<double> shares = pool.skew.rank_shares(n_clients);

    // Rank -> archetype: shuffle the pool once per block of pool-size ranks,
    // so heavy and light ranks both draw from every archetype while each
    // block covers the whole pool.
    std::size_t m = pool.profiles.size();
    RandomStream stream = RandomStream(seed).derive("client-generator");
    std::vector<std::size_t> order(m);
    std::vector<ClientProfile> out;
    out.reserve(n_clients);
    for (std::size_t rank = 0; rank < n_clients; ++rank) {
        if (rank % m == 0) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            for (std::size_t i = m; i > 1; --i) {
                auto j = static_cast<std::size_t>(stream.next_uniform() * static_cast<double>(i));
                if (j >= i) j = i - 1;
                std::swap(order[i - 1], order[j]);
            }
        }
        ClientProfile c = pool.profiles[order[rank % m]];
        c.client_id += "#" + std::to_string(rank + 1);
        c.base_rate = shares[rank] * total_rate;
        out.push_back(std::move(c));
    }
    return out;
}

void scale_rates(std::vector<ClientProfile>& clients, double total_rate) {
    double sum = 0.0;
    for (const auto& c : clients) sum += c.base_rate;
    if (!(sum > 0.0)) throw DegenerateDataError("scale_rates: current rates sum to zero");
    double factor = total_rate / sum;
    for (auto& c : clients) c.base_rate *= factor;
}

double skew_share(const std::vector<ClientProfile>& clients, std::size_t top_k) {
    if (top_k > clients.size()) throw ParamError("skew_share: top_k exceeds client count");
    std::vector<double> rates;
    rates.reserve(clients.size());
    double total = 0.0;
    for (const auto& c : clients) {
        rates.push_back(c.base_rate);
        total += c.base_rate;
    }
    if (!(total > 0.0)) return 0.0;
    std::sort(rates.rbegin(), rates.rend());
    double top = std::accumulate(rates.begin(), rates.begin() + static_cast<long>(top_k), 0.0);
    return top / total;
}

nlohmann::json pool_to_json(const ClientPool& pool) {
    nlohmann::json skew;
    if (pool.skew.form == SkewSpec::Form::rank_weights) {
        skew = {{"form", "rank-weights"}, {"exponent", pool.skew.exponent}};
    } else {
        skew = {{"form", "explicit"}, {"shares", pool.skew.shares}};
    }
    nlohmann::json clients = nlohmann::json::array();
    for (const auto& p : pool.profiles) {
        nlohmann::json c{{"id", p.client_id},
                         {"arrival", to_json(p.arrival)},
                         {"rate_profile", to_json(p.rate_profile)},
                         {"data", to_json(p.data)}};
        if (p.conversation) c["conversation"] = to_json(*p.conversation);
        clients.push_back(std::move(c));
    }
    return nlohmann::json{{"category", category_name(pool.category)},
                          {"skew", skew},
                          {"clients", clients}};
}

ClientPool pool_from_json(const nlohmann::json& j) {
    ClientPool pool;
    pool.category = category_from_name(j.at("category").get<std::string>());

    const auto& skew = j.at("skew");
    std::string form = skew.at("form").get<std::string>();
    if (form == "rank-weights") {
        pool.skew.form = SkewSpec::Form::rank_weights;
        pool.skew.exponent = skew.at("exponent").get<double>();
    } else if (form == "explicit") {
        pool.skew.form = SkewSpec::Form::explicit_shares;
        pool.skew.shares = skew.at("shares").get<std::vector<double>>();
    } else {
        throw PoolError("client pool: unknown skew form '" + form + "'");
    }

    for (const auto& c : j.at("clients")) {
        ClientProfile p;
        p.client_id = c.at("id").get<std::string>();
        p.category = pool.category;
        p.arrival = arrival_spec_from_json(c.at("arrival"));
        p.rate_profile = rate_profile_from_json(c.at("rate_profile"));
        p.data = data_spec_from_json(c.at("data"));
        if (c.contains("conversation")) {
            p.conversation = conversation_spec_from_json(c.at("conversation"));
        }
        pool.profiles.push_back(std::move(p));
    }
    pool.validate();
    return pool;
}

ClientPool load_pool(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PoolError("client pool: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw PoolError("client pool: parse failure in '" + path + "': " + e.what());
    }
    return pool_from_json(j);
}

void save_pool(const ClientPool& pool, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw PoolError("client pool: cannot write '" + path + "'");
    out << pool_to_json(pool).dump(2) << "\n";
}

}  // namespace workgen
