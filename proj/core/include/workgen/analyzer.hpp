#pragma once

#include <map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "workgen/composer.hpp"
#include "workgen/fit.hpp"
#include "workgen/gof.hpp"
#include "workgen/window_stats.hpp"

namespace workgen {

/// Windowed rates, IAT CVs, mean lengths, per-modality token rates, and mean
/// answer fractions over [0, horizon).
std::vector<WindowStats> summarize(const Workload& workload, double window = 300.0);

struct FamilyFit {
    FitResult fit;
    KsResult ks;
};

struct FitWindow {
    double window_start = 0.0;
    std::size_t n_iats = 0;
    std::map<Family, FamilyFit> fits;
    Family best = Family::exponential;  // argmax p-value
};

struct FitReport {
    double window_seconds = 1200.0;
    std::vector<FitWindow> windows;
    std::vector<double> skipped_windows;  // too few IATs
};

/// Per-window MLE + KS for each candidate IAT family; windows with fewer
/// than 100 IATs are skipped with notice.
FitReport fit_report(const Workload& workload,
                     const std::vector<Family>& families = {Family::exponential, Family::gamma,
                                                            Family::weibull},
                     double window = 1200.0);

struct ScatterPoint {
    double window_start = 0.0;
    double rate = 0.0;
    double mean_length = 0.0;  // category-specific length field
    std::size_t count = 0;
};

/// One point per non-empty window: request rate against mean input tokens
/// (language), mean modal tokens (multimodal), or mean answer fraction
/// (reasoning).
std::vector<ScatterPoint> rate_length_scatter(const Workload& workload, double window = 3.0);

/// Pearson correlation over scatter points with at least 3 requests.
double scatter_correlation(const std::vector<ScatterPoint>& points);

struct DivergenceReport {
    double iat_ks_d = 0.0;
    double input_ks_d = 0.0;
    double output_ks_d = 0.0;
    double corr_a = 0.0;
    double corr_b = 0.0;
    double corr_abs_diff = 0.0;
    double rate_span_a = 0.0;  // max/min non-empty scatter-window rate
    double rate_span_b = 0.0;
    double rate_span_diff = 0.0;
};

/// Distributional divergences between two same-category workloads.
DivergenceReport compare(const Workload& a, const Workload& b, double scatter_window = 3.0);

nlohmann::json to_json(const WindowStats& w);
nlohmann::json to_json(const FitReport& report);
nlohmann::json to_json(const DivergenceReport& report);

}  // namespace workgen
