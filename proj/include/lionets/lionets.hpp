#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lionets/explanation.hpp"
#include "lionets/neighbourhood.hpp"
#include "lionets/neural.hpp"
#include "lionets/numerics.hpp"

namespace lionets {

enum class Similarity { euclidean, cosine };

Similarity parse_similarity(std::string_view name);

struct NeighbourhoodConfig {
    std::size_t size = 2000;
    Similarity similarity = Similarity::euclidean;
    std::vector<double> alpha_grid{0.01, 0.1, 1.0, 10.0};
    std::uint64_t seed = 0;
    /// Predictor output treated as the explained quantity.
    std::size_t target_output = 0;

    /// Small grid used when an explanation is wanted quickly.
    static std::vector<double> fast_grid() { return {1.0}; }
};

struct Neighbourhood {
    Matrix latent;       // N x L
    Matrix decoded;      // N x M
    Vec predictions;     // predictor output on each decoded row
    Vec weights;         // locality kernel per row
    Vec surrogate_predictions;
    std::size_t first_order_count = 0;
};

struct LocalExplanation {
    Explanation explanation;
    Neighbourhood neighbourhood;
};

/// Scalar predictor output used as the surrogate target (positive-class probability for
/// a sigmoid classifier, raw value for regression).
double predicted_value(const MLPModel& predictor, std::span<const double> x,
                       std::size_t target_output = 0);

/// Encodes the instance, draws a latent neighbourhood, decodes it, labels it with the
/// predictor, weights it by latent proximity and fits a weighted ridge surrogate for
/// every alpha in the grid, keeping the one with the lowest weighted MAE.
LocalExplanation explain(const MLPModel& predictor, const MLPModel& decoder,
                         const FeatureStats& stats, std::span<const double> instance,
                         const NeighbourhoodConfig& cfg);

struct FeatureWeight {
    std::size_t feature = 0;
    double importance = 0.0;

    friend bool operator==(const FeatureWeight&, const FeatureWeight&) = default;
};

struct CounterfactualReport {
    std::vector<FeatureWeight> present;  // non-zero in the instance, by |importance|
    std::vector<FeatureWeight> absent;   // zero in the instance, top_k by |importance|
    std::optional<FeatureWeight> top_positive;
    std::optional<FeatureWeight> top_negative;
};

/// Splits non-zero importances into features present in a sparse instance and
/// counterfactual candidates that are absent from it.
CounterfactualReport counterfactual_features(const Explanation& expl,
                                             std::span<const double> instance,
                                             std::size_t top_k);

struct SensorInfluence {
    double mean = 0.0;
    double std = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Summarises window x sensors importances (timestep-major layout) per sensor.
std::vector<SensorInfluence> aggregate_sensor_importance(std::span<const double> importances,
                                                         std::size_t window, std::size_t sensors);

}  // namespace lionets
