#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string_view>

#include "lionets/numerics.hpp"

namespace lionets {

using Rng = std::mt19937_64;

enum class NoiseLevel { normal, weak, strong };

NoiseLevel parse_noise_level(std::string_view name);

/// New value for one latent coordinate: value + N(mean, s), clamped to [min, max],
/// where s is std/2, std or 2*std for weak, normal and strong noise.
double determine_value(double value, const FeatureStat& stat, NoiseLevel level, Rng& rng);

/// Latent neighbourhood of exactly `count` rows.
///
/// The first min(3L, count) rows are first-order neighbours: for each dimension i and
/// each level in (normal, weak, strong) a fresh copy of the instance with coordinate i
/// re-drawn. Remaining rows are second-order: a random non-empty binary mask picks the
/// coordinates re-drawn at weak noise.
Matrix generate_neighbourhood(std::span<const double> encoded_instance, std::size_t count,
                              const FeatureStats& stats, Rng& rng);

inline std::size_t first_order_count(std::size_t latent_dim, std::size_t count) {
    return std::min(3 * latent_dim, count);
}

}  // namespace lionets
