#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lionets/explanation.hpp"
#include "lionets/neighbourhood.hpp"
#include "lionets/neural.hpp"

namespace lionets::baselines {

struct LimeConfig {
    std::size_t num_samples = 5000;
    double alpha = 1.0;
    std::uint64_t seed = 0;
    std::size_t target_output = 0;
};

/// keep[j] == false zeroes the j-th active feature.
using LimeMask = std::vector<bool>;

/// First mask keeps every feature; each further mask zeroes a uniform subset whose size
/// is uniform in [1, active_features].
std::vector<LimeMask> sample_lime_masks(std::size_t active_features, std::size_t num_samples,
                                        Rng& rng);

struct LimeResult {
    Explanation explanation;
    Matrix samples;
    Vec predictions;
    Vec weights;  // 1000 * cosine similarity to the instance
    Vec surrogate_predictions;
};

/// Zeroing-perturbation surrogate restricted to the instance's non-zero features.
/// Features absent from the instance always receive importance 0.
LimeResult lime_text_explain(const MLPModel& predictor, std::span<const double> instance,
                             const LimeConfig& cfg);

/// importances = d f[output_index] / dx (elementwise) x. No surrogate, so no fidelity;
/// the intercept is chosen so that local_prediction equals the model prediction.
Explanation gradient_x_input_explain(const MLPModel& predictor, std::span<const double> instance,
                                     std::size_t output_index = 0);

}  // namespace lionets::baselines
