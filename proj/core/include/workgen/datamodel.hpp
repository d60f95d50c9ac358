#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "workgen/distribution.hpp"
#include "workgen/random.hpp"

namespace workgen {

enum class Category { language, multimodal, reasoning };
enum class Modality { image, audio, video };

const char* category_name(Category c);
Category category_from_name(std::string_view name);
const char* modality_name(Modality m);
Modality modality_from_name(std::string_view name);

// Language payload sizes: a heavy-tailed input length model, an output length
// model (typically Exponential), and a rank-coupling knob between them.
struct LanguageDataSpec {
    DistributionSpec input;   // usually log-normal body + Pareto tail
    DistributionSpec output;  // usually exponential
    double correlation = 0.0;

    void validate() const;
};

struct ModalitySpec {
    Modality modality = Modality::image;
    DistributionSpec count_dist;   // items per request, nonnegative integers
    DistributionSpec item_tokens;  // tokenized length per item
};

// Multimodal payloads: a text part plus per-modality item counts and sizes,
// with modal tokens sampled independently of the text tokens.
struct MultimodalDataSpec {
    LanguageDataSpec text;
    std::vector<ModalitySpec> modalities;

    void validate() const;
};

// Reasoning payloads: the output splits into reason and answer sections; the
// answer fraction comes from a (typically bimodal two-component) mixture and
// is rank-coupled to the output length.
struct ReasoningDataSpec {
    DistributionSpec input;
    DistributionSpec output;
    DistributionSpec ratio_mix;        // answer fraction in (0, 1)
    double reason_answer_corr = 0.5;

    void validate() const;
};

using DataSpec = std::variant<LanguageDataSpec, MultimodalDataSpec, ReasoningDataSpec>;

Category category_of(const DataSpec& spec);
void validate(const DataSpec& spec);

struct ModalItem {
    Modality modality = Modality::image;
    std::int64_t tokens = 0;
};

struct RequestData {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::vector<ModalItem> modal_items;
    std::int64_t reason_tokens = 0;
    std::int64_t answer_tokens = 0;
};

struct SampleOptions {
    std::int64_t output_cap = 32768;  // hard truncation on sampled output length
};

RequestData sample_language(const LanguageDataSpec& spec, RandomStream& stream,
                            const SampleOptions& opts = {});
RequestData sample_multimodal(const MultimodalDataSpec& spec, RandomStream& stream,
                              const SampleOptions& opts = {});
RequestData sample_reasoning(const ReasoningDataSpec& spec, RandomStream& stream,
                             const SampleOptions& opts = {});
RequestData sample_data(const DataSpec& spec, RandomStream& stream,
                        const SampleOptions& opts = {});

/// Fraction of the request's input that is multimodal.
double modal_ratio(const RequestData& data);

nlohmann::json to_json(const DataSpec& spec);
DataSpec data_spec_from_json(const nlohmann::json& j);

}  // namespace workgen
