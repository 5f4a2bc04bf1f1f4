#include "lionets/timeseries.hpp"

#include <string>

#include "lionets/errors.hpp"

namespace lionets::data {

TimeWindowDataset make_windows(const std::vector<UnitSeries>& series, std::size_t window) {
    if (window == 0) throw DomainError("window size must be at least 1");
    TimeWindowDataset out;
    out.window = window;
    if (series.empty()) return out;
    out.sensors = series.front().readings.cols();

    Vec flat(window * out.sensors);
    for (const auto& unit : series) {
        const std::size_t length = unit.readings.rows();
        if (unit.readings.cols() != out.sensors) {
            throw DimensionError("unit " + std::to_string(unit.unit) + " has " +
                                 std::to_string(unit.readings.cols()) + " sensors, expected " +
                                 std::to_string(out.sensors));
        }
        if (unit.rul.size() != length) {
            throw DimensionError("unit " + std::to_string(unit.unit) + " RUL length mismatch");
        }
        if (length < window) {
            out.skipped_units.push_back(unit.unit);
            continue;
        }
        for (std::size_t end = window - 1; end < length; ++end) {
            const std::size_t begin = end + 1 - window;
            for (std::size_t t = 0; t < window; ++t) {
                const auto r = unit.readings.row(begin + t);
                std::copy(r.begin(), r.end(), flat.begin() + static_cast<std::ptrdiff_t>(t * out.sensors));
            }
            out.windows.append_row(flat);
            out.labels.push_back(unit.rul[end]);
            out.units.push_back(unit.unit);
            out.end_timesteps.push_back(unit.timesteps.empty() ? static_cast<int>(end)
                                                               : unit.timesteps[end]);
        }
    }
    return out;
}

Vec binarize_rul(std::span<const double> rul, double threshold) {
    if (!(threshold > 0.0)) throw DomainError("RUL threshold must be positive");
    Vec out(rul.size());
    for (std::size_t i = 0; i < rul.size(); ++i) out[i] = rul[i] <= threshold ? 1.0 : 0.0;
    return out;
}

}  // namespace lionets::data
