#include "workgen/datamodel.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "workgen/error.hpp"
#include "workgen/math.hpp"

namespace workgen {
namespace {

std::int64_t round_half_up(double x) {
    return static_cast<std::int64_t>(std::floor(x + 0.5));
}

std::int64_t round_min1(double x) {
    return std::max<std::int64_t>(1, round_half_up(x));
}

// Correlated uniform pair via a Gaussian copula: the second uniform shares
// rank correlation `rho` with the first while staying marginally uniform.
double coupled_uniform(double u1, double rho, RandomStream& stream) {
    double z1 = math::normal_quantile(u1);
    double z2 = rho * z1 + std::sqrt(1.0 - rho * rho) * stream.next_normal();
    return math::normal_cdf(z2);
}

}  // namespace

const char* category_name(Category c) {
    switch (c) {
        case Category::language: return "language";
        case Category::multimodal: return "multimodal";
        case Category::reasoning: return "reasoning";
    }
    return "?";
}

Category category_from_name(std::string_view name) {
    if (name == "language") return Category::language;
    if (name == "multimodal") return Category::multimodal;
    if (name == "reasoning") return Category::reasoning;
    throw ParamError("unknown category: " + std::string(name));
}

const char* modality_name(Modality m) {
    switch (m) {
        case Modality::image: return "image";
        case Modality::audio: return "audio";
        case Modality::video: return "video";
    }
    return "?";
}

Modality modality_from_name(std::string_view name) {
    if (name == "image") return Modality::image;
    if (name == "audio") return Modality::audio;
    if (name == "video") return Modality::video;
    throw ParamError("unknown modality: " + std::string(name));
}

void LanguageDataSpec::validate() const {
    input.validate();
    output.validate();
    if (!(mean(input) >= 1.0)) throw ParamError("language data: input mean must be >= 1 token");
    if (!(correlation >= 0.0 && correlation <= 1.0))
        throw ParamError("language data: correlation must be in [0, 1]");
}

void MultimodalDataSpec::validate() const {
    text.validate();
    for (const auto& m : modalities) {
        m.count_dist.validate();
        m.item_tokens.validate();
    }
}

void ReasoningDataSpec::validate() const {
    input.validate();
    output.validate();
    ratio_mix.validate();
    if (!(mean(output) > 0.0)) throw ParamError("reasoning data: output mean must be positive");
    if (!(reason_answer_corr >= 0.0 && reason_answer_corr <= 1.0))
        throw ParamError("reasoning data: reason_answer_corr must be in [0, 1]");
}

Category category_of(const DataSpec& spec) {
    if (std::holds_alternative<LanguageDataSpec>(spec)) return Category::language;
    if (std::holds_alternative<MultimodalDataSpec>(spec)) return Category::multimodal;
    return Category::reasoning;
}

void validate(const DataSpec& spec) {
    std::visit([](const auto& s) { s.validate(); }, spec);
}

RequestData sample_language(const LanguageDataSpec& spec, RandomStream& stream,
                            const SampleOptions& opts) {
    double u_in = stream.next_uniform();
    double u_out = coupled_uniform(u_in, spec.correlation, stream);
    RequestData d;
    d.input_tokens = round_min1(quantile(spec.input, u_in));
    d.output_tokens = std::min(opts.output_cap, round_min1(quantile(spec.output, u_out)));
    return d;
}

RequestData sample_multimodal(const MultimodalDataSpec& spec, RandomStream& stream,
                              const SampleOptions& opts) {
    RequestData d = sample_language(spec.text, stream, opts);
    for (const auto& m : spec.modalities) {
        auto count = std::max<std::int64_t>(0, round_half_up(sample_one(m.count_dist, stream)));
        for (std::int64_t i = 0; i < count; ++i) {
            d.modal_items.push_back({m.modality, round_min1(sample_one(m.item_tokens, stream))});
        }
    }
    return d;
}

RequestData sample_reasoning(const ReasoningDataSpec& spec, RandomStream& stream,
                             const SampleOptions& opts) {
    double u_out = stream.next_uniform();
    double u_ratio = coupled_uniform(u_out, spec.reason_answer_corr, stream);

    RequestData d;
    d.input_tokens = round_min1(sample_one(spec.input, stream));
    d.output_tokens = std::min(opts.output_cap, round_min1(quantile(spec.output, u_out)));

    double frac = std::clamp(quantile(spec.ratio_mix, u_ratio), 1e-9, 1.0 - 1e-9);
    if (d.output_tokens >= 2) {
        d.answer_tokens = std::clamp<std::int64_t>(
            round_half_up(frac * static_cast<double>(d.output_tokens)), 1, d.output_tokens - 1);
        d.reason_tokens = d.output_tokens - d.answer_tokens;
    } else {
        d.answer_tokens = 1;
        d.reason_tokens = 0;
    }
    return d;
}

RequestData sample_data(const DataSpec& spec, RandomStream& stream, const SampleOptions& opts) {
    if (const auto* l = std::get_if<LanguageDataSpec>(&spec)) return sample_language(*l, stream, opts);
    if (const auto* m = std::get_if<MultimodalDataSpec>(&spec)) return sample_multimodal(*m, stream, opts);
    return sample_reasoning(std::get<ReasoningDataSpec>(spec), stream, opts);
}

double modal_ratio(const RequestData& data) {
    double modal = 0.0;
    for (const auto& item : data.modal_items) modal += static_cast<double>(item.tokens);
    return modal / (modal + static_cast<double>(data.input_tokens));
}

nlohmann::json to_json(const DataSpec& spec) {
    nlohmann::json j;
    j["category"] = category_name(category_of(spec));
    if (const auto* lang = std::get_if<LanguageDataSpec>(&spec)) {
        j["input"] = to_json(lang->input);
        j["output"] = to_json(lang->output);
        j["correlation"] = lang->correlation;
    } else if (const auto* mm = std::get_if<MultimodalDataSpec>(&spec)) {
        j["text"] = nlohmann::json{{"input", to_json(mm->text.input)},
                                   {"output", to_json(mm->text.output)},
                                   {"correlation", mm->text.correlation}};
        nlohmann::json mods = nlohmann::json::array();
        for (const auto& m : mm->modalities) {
            mods.push_back({{"modality", modality_name(m.modality)},
                            {"count", to_json(m.count_dist)},
                            {"item_tokens", to_json(m.item_tokens)}});
        }
        j["modalities"] = mods;
    } else {
        const auto& r = std::get<ReasoningDataSpec>(spec);
        j["input"] = to_json(r.input);
        j["output"] = to_json(r.output);
        j["ratio_mix"] = to_json(r.ratio_mix);
        j["reason_answer_corr"] = r.reason_answer_corr;
    }
    return j;
}

namespace {

LanguageDataSpec language_from_json(const nlohmann::json& j) {
    LanguageDataSpec s;
    s.input = spec_from_json(j.at("input"));
    s.output = spec_from_json(j.at("output"));
    s.correlation = j.value("correlation", 0.0);
    s.validate();
    return s;
}

}  // namespace

DataSpec data_spec_from_json(const nlohmann::json& j) {
    Category cat = category_from_name(j.at("category").get<std::string>());
    switch (cat) {
        case Category::language:
            return language_from_json(j);
        case Category::multimodal: {
            MultimodalDataSpec s;
            s.text = language_from_json(j.at("text"));
            for (const auto& m : j.value("modalities", nlohmann::json::array())) {
                ModalitySpec ms;
                ms.modality = modality_from_name(m.at("modality").get<std::string>());
                ms.count_dist = spec_from_json(m.at("count"));
                ms.item_tokens = spec_from_json(m.at("item_tokens"));
                s.modalities.push_back(std::move(ms));
            }
            s.validate();
            return s;
        }
        case Category::reasoning: {
            ReasoningDataSpec s;
            s.input = spec_from_json(j.at("input"));
            s.output = spec_from_json(j.at("output"));
            s.ratio_mix = spec_from_json(j.at("ratio_mix"));
            s.reason_answer_corr = j.value("reason_answer_corr", 0.5);
            s.validate();
            return s;
        }
    }
    throw ParamError("data spec: unknown category");
}

}  // namespace workgen
