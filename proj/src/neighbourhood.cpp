#include "lionets/neighbourhood.hpp"

#include <algorithm>
#include <string>

#include "lionets/errors.hpp"

namespace lionets {

NoiseLevel parse_noise_level(std::string_view name) {
    if (name == "normal") return NoiseLevel::normal;
    if (name == "weak") return NoiseLevel::weak;
    if (name == "strong") return NoiseLevel::strong;
    throw DomainError("unknown noise level '" + std::string(name) + "'");
}

double determine_value(double value, const FeatureStat& stat, NoiseLevel level, Rng& rng) {
    double spread = stat.std;
    switch (level) {
        case NoiseLevel::normal:
            break;
        case NoiseLevel::weak:
            spread /= 2.0;
            break;
        case NoiseLevel::strong:
            spread *= 2.0;
            break;
        default:
            throw DomainError("unknown noise level");
    }
    // Drawn as mean + s * z so that a zero spread is well defined.
    std::normal_distribution<double> standard(0.0, 1.0);
    const double noise = stat.mean + spread * standard(rng);
    return std::min(std::max(value + noise, stat.min), stat.max);
}

Matrix generate_neighbourhood(std::span<const double> encoded_instance, std::size_t count,
                              const FeatureStats& stats, Rng& rng) {
    const std::size_t dims = encoded_instance.size();
    if (count < 1) throw DomainError("neighbourhood size must be at least 1");
    if (stats.size() != dims) {
        throw DimensionError("feature stats cover " + std::to_string(stats.size()) +
                             " dimensions, instance has " + std::to_string(dims));
    }
    require_finite(encoded_instance, "encoded instance");

    // Coordinates that are not re-drawn still have to respect the training range.
    Vec base(encoded_instance.begin(), encoded_instance.end());
    for (std::size_t i = 0; i < dims; ++i) base[i] = std::clamp(base[i], stats[i].min, stats[i].max);

    Matrix out(count, dims);
    std::size_t row = 0;
    constexpr NoiseLevel kLevels[] = {NoiseLevel::normal, NoiseLevel::weak, NoiseLevel::strong};
    for (std::size_t i = 0; i < dims && row < count; ++i) {
        for (NoiseLevel level : kLevels) {
            if (row == count) break;
            auto r = out.row(row++);
            std::copy(base.begin(), base.end(), r.begin());
            r[i] = determine_value(base[i], stats[i], level, rng);
        }
    }

    std::bernoulli_distribution coin(0.5);
    std::vector<std::size_t> mask;
    mask.reserve(dims);
    while (row < count) {
        do {
            mask.clear();
            for (std::size_t i = 0; i < dims; ++i) {
                if (coin(rng)) mask.push_back(i);
            }
        } while (mask.empty());
        auto r = out.row(row++);
        std::copy(base.begin(), base.end(), r.begin());
        for (std::size_t i : mask) r[i] = determine_value(r[i], stats[i], NoiseLevel::weak, rng);
    }
    return out;
}

}  // namespace lionets
