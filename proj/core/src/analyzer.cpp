#include "workgen/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "workgen/error.hpp"

namespace workgen {
namespace {

double workload_span(const Workload& w) {
    if (w.meta.horizon > 0.0) return w.meta.horizon;
    return w.records.empty() ? 0.0 : w.records.back().timestamp + 1e-9;
}

std::vector<std::vector<double>> window_iats(const Workload& w, double window,
                                             std::size_t n_windows) {
    std::vector<std::vector<double>> iats(n_windows);
    const auto& recs = w.records;
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
        double gap = recs[i + 1].timestamp - recs[i].timestamp;
        auto win = static_cast<std::size_t>(recs[i].timestamp / window);
        if (gap > 0.0 && win < n_windows) iats[win].push_back(gap);
    }
    return iats;
}

}  // namespace

std::vector<WindowStats> summarize(const Workload& workload, double window) {
    if (!(window > 0.0)) throw ParamError("summarize: window must be positive");
    double span = workload_span(workload);
    if (span <= 0.0) return {};
    auto n_windows = static_cast<std::size_t>(std::ceil(span / window));

    std::vector<WindowStats> out(n_windows);
    std::vector<double> in_sum(n_windows, 0.0), out_sum(n_windows, 0.0), frac_sum(n_windows, 0.0);
    std::vector<std::size_t> frac_n(n_windows, 0);
    std::vector<std::map<std::string, double>> modal(n_windows);

    for (const auto& r : workload.records) {
        auto w = static_cast<std::size_t>(r.timestamp / window);
        if (w >= n_windows) continue;
        out[w].count += 1;
        in_sum[w] += static_cast<double>(r.input_tokens);
        out_sum[w] += static_cast<double>(r.output_tokens);
        for (const auto& item : r.modal_items) {
            modal[w][modality_name(item.modality)] += static_cast<double>(item.tokens);
        }
        if (r.answer_tokens && r.output_tokens > 0) {
            frac_sum[w] += static_cast<double>(*r.answer_tokens) /
                           static_cast<double>(r.output_tokens);
            frac_n[w] += 1;
        }
    }

    auto iats = window_iats(workload, window, n_windows);
    for (std::size_t w = 0; w < n_windows; ++w) {
        out[w].window_start = static_cast<double>(w) * window;
        out[w].rate = static_cast<double>(out[w].count) / window;
        if (out[w].count >= 3 && iats[w].size() >= 2) out[w].iat_cv = cv(iats[w]);
        if (out[w].count > 0) {
            out[w].mean_input = in_sum[w] / static_cast<double>(out[w].count);
            out[w].mean_output = out_sum[w] / static_cast<double>(out[w].count);
        }
        for (const auto& [name, tokens] : modal[w]) {
            out[w].modal_token_rates[name] = tokens / window;
        }
        if (frac_n[w] > 0) out[w].mean_answer_fraction = frac_sum[w] / static_cast<double>(frac_n[w]);
    }
    return out;
}

FitReport fit_report(const Workload& workload, const std::vector<Family>& families,
                     double window) {
    if (!(window > 0.0)) throw ParamError("fit_report: window must be positive");
    FitReport report;
    report.window_seconds = window;
    double span = workload_span(workload);
    if (span <= 0.0) return report;
    auto n_windows = static_cast<std::size_t>(std::ceil(span / window));
    auto iats = window_iats(workload, window, n_windows);

    for (std::size_t w = 0; w < n_windows; ++w) {
        if (iats[w].size() < 100) {
            report.skipped_windows.push_back(static_cast<double>(w) * window);
            continue;
        }
        FitWindow fw;
        fw.window_start = static_cast<double>(w) * window;
        fw.n_iats = iats[w].size();
        double best_p = -1.0;
        for (Family fam : families) {
            FamilyFit ff;
            try {
                ff.fit = fit_mle(fam, iats[w]);
            } catch (const DegenerateDataError&) {
                continue;
            }
            ff.ks = ks_test(iats[w], ff.fit.spec);
            if (ff.ks.p_value > best_p) {
                best_p = ff.ks.p_value;
                fw.best = fam;
            }
            fw.fits.emplace(fam, std::move(ff));
        }
        if (!fw.fits.empty()) report.windows.push_back(std::move(fw));
    }
    return report;
}

std::vector<ScatterPoint> rate_length_scatter(const Workload& workload, double window) {
    if (!(window > 0.0)) throw ParamError("rate_length_scatter: window must be positive");
    double span = workload_span(workload);
    if (span <= 0.0) return {};
    auto n_windows = static_cast<std::size_t>(std::ceil(span / window));

    std::vector<double> length_sum(n_windows, 0.0);
    std::vector<std::size_t> counts(n_windows, 0);
    for (const auto& r : workload.records) {
        auto w = static_cast<std::size_t>(r.timestamp / window);
        if (w >= n_windows) continue;
        counts[w] += 1;
        switch (workload.meta.category) {
            case Category::language:
                length_sum[w] += static_cast<double>(r.input_tokens);
                break;
            case Category::multimodal: {
                double modal = 0.0;
                for (const auto& item : r.modal_items) modal += static_cast<double>(item.tokens);
                length_sum[w] += modal;
                break;
            }
            case Category::reasoning:
                if (r.answer_tokens && r.output_tokens > 0) {
                    length_sum[w] += static_cast<double>(*r.answer_tokens) /
                                     static_cast<double>(r.output_tokens);
                }
                break;
        }
    }
    std::vector<ScatterPoint> points;
    for (std::size_t w = 0; w < n_windows; ++w) {
        if (counts[w] == 0) continue;
        points.push_back({static_cast<double>(w) * window,
                          static_cast<double>(counts[w]) / window,
                          length_sum[w] / static_cast<double>(counts[w]), counts[w]});
    }
    return points;
}

double scatter_correlation(const std::vector<ScatterPoint>& points) {
    std::vector<double> xs, ys;
    for (const auto& p : points) {
        if (p.count >= 3) {
            xs.push_back(p.rate);
            ys.push_back(p.mean_length);
        }
    }
    if (xs.size() < 2) return 0.0;
    double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        dx += (xs[i] - mx) * (xs[i] - mx);
        dy += (ys[i] - my) * (ys[i] - my);
    }
    if (dx <= 0.0 || dy <= 0.0) return 0.0;
    return num / std::sqrt(dx * dy);
}

namespace {

double rate_span(const std::vector<ScatterPoint>& points) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& p : points) {
        lo = std::min(lo, p.rate);
        hi = std::max(hi, p.rate);
    }
    if (!(lo > 0.0) || hi <= 0.0) return 0.0;
    return hi / lo;
}

std::vector<double> field_values(const Workload& w, bool input) {
    std::vector<double> v;
    v.reserve(w.records.size());
    for (const auto& r : w.records) {
        v.push_back(static_cast<double>(input ? r.input_tokens : r.output_tokens));
    }
    return v;
}

}  // namespace

DivergenceReport compare(const Workload& a, const Workload& b, double scatter_window) {
    if (a.meta.category != b.meta.category)
        throw ParamError("compare: workloads must share a category");

    DivergenceReport rep;
    auto iats_a = request_iats(a);
    auto iats_b = request_iats(b);
    if (iats_a.size() >= 2 && iats_b.size() >= 2) {
        rep.iat_ks_d = ks_two_sample(iats_a, iats_b).statistic;
    }
    auto in_a = field_values(a, true), in_b = field_values(b, true);
    auto out_a = field_values(a, false), out_b = field_values(b, false);
    if (in_a.size() >= 2 && in_b.size() >= 2) {
        rep.input_ks_d = ks_two_sample(in_a, in_b).statistic;
        rep.output_ks_d = ks_two_sample(out_a, out_b).statistic;
    }

    auto pa = rate_length_scatter(a, scatter_window);
    auto pb = rate_length_scatter(b, scatter_window);
    rep.corr_a = scatter_correlation(pa);
    rep.corr_b = scatter_correlation(pb);
    rep.corr_abs_diff = std::fabs(rep.corr_a - rep.corr_b);
    rep.rate_span_a = rate_span(pa);
    rep.rate_span_b = rate_span(pb);
    rep.rate_span_diff = rep.rate_span_a - rep.rate_span_b;
    return rep;
}

nlohmann::json to_json(const WindowStats& w) {
    nlohmann::json j{{"window_start", w.window_start}, {"rate", w.rate}, {"count", w.count}};
    if (w.iat_cv) j["iat_cv"] = *w.iat_cv;
    if (w.mean_input) j["mean_input"] = *w.mean_input;
    if (w.mean_output) j["mean_output"] = *w.mean_output;
    if (!w.modal_token_rates.empty()) j["modal_token_rates"] = w.modal_token_rates;
    if (w.mean_answer_fraction) j["mean_answer_fraction"] = *w.mean_answer_fraction;
    return j;
}

nlohmann::json to_json(const FitReport& report) {
    nlohmann::json windows = nlohmann::json::array();
    for (const auto& w : report.windows) {
        nlohmann::json fits;
        for (const auto& [fam, ff] : w.fits) {
            fits[family_name(fam)] = {{"log_likelihood", ff.fit.log_likelihood},
                                      {"ks_d", ff.ks.statistic},
                                      {"p_value", ff.ks.p_value},
                                      {"spec", to_json(ff.fit.spec)}};
        }
        windows.push_back({{"window_start", w.window_start},
                           {"n_iats", w.n_iats},
                           {"best", family_name(w.best)},
                           {"fits", fits}});
    }
    return nlohmann::json{{"window_seconds", report.window_seconds},
                          {"windows", windows},
                          {"skipped_windows", report.skipped_windows}};
}

nlohmann::json to_json(const DivergenceReport& r) {
    return nlohmann::json{{"iat_ks_d", r.iat_ks_d},
                          {"input_ks_d", r.input_ks_d},
                          {"output_ks_d", r.output_ks_d},
                          {"corr_a", r.corr_a},
                          {"corr_b", r.corr_b},
                          {"corr_abs_diff", r.corr_abs_diff},
                          {"rate_span_a", r.rate_span_a},
                          {"rate_span_b", r.rate_span_b},
                          {"rate_span_diff", r.rate_span_diff}};
}

}  // namespace workgen
