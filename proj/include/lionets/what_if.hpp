#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lionets/neural.hpp"
#include "lionets/numerics.hpp"
#include "lionets/text.hpp"

namespace lionets {

struct TokenEdit {
    enum class Kind { remove, add };
    Kind kind = Kind::remove;
    std::string token;
};

/// Edit of a flattened window. `set` writes `value` at (sensor, first_timestep);
/// `add_delta` adds `value` to the sensor over [first_timestep, last_timestep].
struct SensorEdit {
    enum class Kind { set, add_delta };
    Kind kind = Kind::set;
    std::size_t sensor = 0;
    std::size_t first_timestep = 0;
    std::size_t last_timestep = 0;
    double value = 0.0;
};

struct WhatIfResult {
    double prediction = 0.0;
    Vec instance;
    std::string text;  // edited, preprocessed sentence (text edits only)
    std::vector<std::string> warnings;
};

/// Applies token edits to a raw sentence and returns the preprocessed result.
/// `remove` drops the first occurrence of the token, `add` appends it. Edits that
/// cannot affect the vector (missing or out-of-vocabulary tokens) add a warning.
std::string apply_token_edits(std::string_view raw, std::span<const TokenEdit> edits,
                              const data::Vocabulary& vocab, std::vector<std::string>& warnings);

WhatIfResult what_if_text(const MLPModel& predictor, const data::Vocabulary& vocab,
                          std::string_view raw, std::span<const TokenEdit> edits,
                          std::size_t target_output = 0);

/// Edits a copy of a timestep-major window; out-of-range sensors or timesteps throw
/// DomainError.
Vec apply_sensor_edits(std::span<const double> instance, std::size_t window, std::size_t sensors,
                       std::span<const SensorEdit> edits);

WhatIfResult what_if_series(const MLPModel& predictor, std::span<const double> instance,
                            std::size_t window, std::size_t sensors,
                            std::span<const SensorEdit> edits, std::size_t target_output = 0);

}  // namespace lionets
