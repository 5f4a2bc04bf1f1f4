#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lionets/numerics.hpp"

namespace lionets::data {

/// Run-to-failure record of one unit: one row per timestep, one column per sensor.
struct UnitSeries {
    int unit = 0;
    std::vector<int> timesteps;
    Matrix readings;  // T x sensors
    Vec rul;          // T
};

/// Flattened sliding windows. Row layout is timestep-major: element t * sensors + s.
struct TimeWindowDataset {
    Matrix windows;
    Vec labels;
    std::vector<int> units;
    std::vector<int> end_timesteps;
    std::size_t window = 0;
    std::size_t sensors = 0;
    std::vector<int> skipped_units;
};

/// One window per timestep t >= window - 1 of each unit, labelled with the RUL at t.
/// Units shorter than the window are skipped and listed in `skipped_units`.
TimeWindowDataset make_windows(const std::vector<UnitSeries>& series, std::size_t window);

/// 1 where RUL <= threshold, 0 where RUL > threshold.
Vec binarize_rul(std::span<const double> rul, double threshold);

inline std::size_t window_index(std::size_t timestep, std::size_t sensor, std::size_t sensors) {
    return timestep * sensors + sensor;
}

}  // namespace lionets::data
