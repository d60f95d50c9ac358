#pragma once

// Shared helpers for test oracles. Everything here is independent of the
// implementation paths it checks.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace testutil {

inline double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double pop_stdev(const std::vector<double>& v) {
    double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = mean(a), mb = mean(b);
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(da * db);
}

inline std::vector<double> diffs(const std::vector<double>& ts) {
    std::vector<double> out;
    for (std::size_t i = 1; i < ts.size(); ++i) out.push_back(ts[i] - ts[i - 1]);
    return out;
}

// Histogram mode counting: a bin is a mode when it strictly dominates every
// bin within `radius` and clears `floor_frac` of the tallest bin.
inline std::vector<std::size_t> histogram_modes(const std::vector<std::size_t>& hist,
                                                int radius = 5, double floor_frac = 0.02) {
    std::size_t max_bin = *std::max_element(hist.begin(), hist.end());
    double floor = floor_frac * static_cast<double>(max_bin);
    std::vector<std::size_t> modes;
    int n = static_cast<int>(hist.size());
    for (int b = 0; b < n; ++b) {
        if (static_cast<double>(hist[b]) < floor) continue;
        bool is_mode = true;
        for (int j = std::max(0, b - radius); j <= std::min(n - 1, b + radius); ++j) {
            if (j != b && hist[j] >= hist[b]) {
                is_mode = false;
                break;
            }
        }
        if (is_mode) modes.push_back(static_cast<std::size_t>(b));
    }
    return modes;
}

}  // namespace testutil
