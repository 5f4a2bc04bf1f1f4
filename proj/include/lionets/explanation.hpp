#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lionets/numerics.hpp"

namespace lionets {

/// Per-input-feature importances produced by any explainer.
///
/// For surrogate-based explainers `local_prediction` is the surrogate evaluated at the
/// instance and the fidelity fields describe the surrogate on its own neighbourhood.
/// Gradient-based explainers carry no fidelity.
struct Explanation {
    std::string explainer;
    Vec importances;
    double intercept = 0.0;
    double local_prediction = 0.0;
    double model_prediction = 0.0;
    std::optional<double> fidelity_mae;
    std::optional<double> fidelity_r2;
    double chosen_alpha = 0.0;
    std::uint64_t seed = 0;
};

/// |importance| at or below this is treated as zero.
inline constexpr double kZeroImportance = 1e-12;

inline bool is_nonzero_importance(double v) { return v > kZeroImportance || v < -kZeroImportance; }

}  // namespace lionets
