#include "lionets/what_if.hpp"

#include <algorithm>
#include <cmath>

#include "lionets/errors.hpp"
#include "lionets/lionets.hpp"

namespace lionets {

std::string apply_token_edits(std::string_view raw, std::span<const TokenEdit> edits,
                              const data::Vocabulary& vocab, std::vector<std::string>& warnings) {
    std::vector<std::string> tokens = data::tokenize(data::preprocess_text(raw));
    for (const auto& edit : edits) {
        const std::vector<std::string> parts = data::tokenize(data::preprocess_text(edit.token));
        if (parts.empty()) {
            warnings.push_back("token '" + edit.token + "' is empty after preprocessing");
            continue;
        }
        for (const auto& t : parts) {
            if (edit.kind == TokenEdit::Kind::remove) {
                auto it = std::find(tokens.begin(), tokens.end(), t);
                if (it == tokens.end()) {
                    warnings.push_back("token '" + t + "' is not in the sentence");
                } else {
                    tokens.erase(it);
                }
            } else {
                if (!vocab.index_of(t)) {
                    warnings.push_back("token '" + t + "' is not in the vocabulary");
                }
                tokens.push_back(t);
            }
        }
    }
    std::string text;
    for (const auto& t : tokens) {
        if (!text.empty()) text.push_back(' ');
        text += t;
    }
    return text;
}

WhatIfResult what_if_text(const MLPModel& predictor, const data::Vocabulary& vocab,
                          std::string_view raw, std::span<const TokenEdit> edits,
                          std::size_t target_output) {
    WhatIfResult r;
    r.text = apply_token_edits(raw, edits, vocab, r.warnings);
    r.instance = data::tfidf_transform(vocab, r.text);
    if (r.instance.size() != predictor.input_dim) {
        throw DimensionError("vocabulary size does not match the predictor input");
    }
    r.prediction = predicted_value(predictor, r.instance, target_output);
    return r;
}

Vec apply_sensor_edits(std::span<const double> instance, std::size_t window, std::size_t sensors,
                       std::span<const SensorEdit> edits) {
    if (window * sensors != instance.size()) {
        throw DimensionError("window x sensors does not match the instance length");
    }
    Vec out(instance.begin(), instance.end());
    for (const auto& e : edits) {
        if (e.sensor >= sensors) {
            throw DomainError("sensor " + std::to_string(e.sensor) + " out of range");
        }
        const std::size_t last = e.kind == SensorEdit::Kind::set ? e.first_timestep : e.last_timestep;
        if (e.first_timestep >= window || last >= window || last < e.first_timestep) {
            throw DomainError("timestep range out of bounds");
        }
        if (!std::isfinite(e.value)) throw DomainError("edit value must be finite");
        for (std::size_t t = e.first_timestep; t <= last; ++t) {
            double& v = out[t * sensors + e.sensor];
            v = e.kind == SensorEdit::Kind::set ? e.value : v + e.value;
        }
    }
    return out;
}

WhatIfResult what_if_series(const MLPModel& predictor, std::span<const double> instance,
                            std::size_t window, std::size_t sensors,
                            std::span<const SensorEdit> edits, std::size_t target_output) {
    WhatIfResult r;
    r.instance = apply_sensor_edits(instance, window, sensors, edits);
    if (r.instance.size() != predictor.input_dim) {
        throw DimensionError("instance length does not match the predictor input");
    }
    r.prediction = predicted_value(predictor, r.instance, target_output);
    return r;
}

}  // namespace lionets
