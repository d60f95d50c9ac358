#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>

namespace workgen {

// Per-window summary shared by the arrival analytics and workload analyses.
// Token fields stay empty for bare timestamp streams.
struct WindowStats {
    double window_start = 0.0;
    double rate = 0.0;  // requests/second
    std::size_t count = 0;
    std::optional<double> iat_cv;  // absent when the window has < 3 arrivals

    std::optional<double> mean_input;
    std::optional<double> mean_output;
    std::map<std::string, double> modal_token_rates;  // tokens/second per modality
    std::optional<double> mean_answer_fraction;
};

}  // namespace workgen
