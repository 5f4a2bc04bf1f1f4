#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lionets/explanation.hpp"
#include "lionets/lionets.hpp"

namespace lionets {

struct ExplanationDocument {
    std::string instance_id;
    const Explanation* explanation = nullptr;
    std::span<const double> instance;
    /// One name per feature; indices are used when empty.
    std::span<const std::string> feature_names;
    /// Sparse data lists only the features present in the instance.
    bool sparse = false;
    std::optional<CounterfactualReport> counterfactuals;
    std::vector<SensorInfluence> sensors;  // windowed data only
};

/// Explanation file contents. `fidelity_mae` is omitted for explainers without a
/// surrogate.
nlohmann::json explanation_to_json(const ExplanationDocument& doc);

/// CSV (feature,importance) sorted by |importance|, largest first.
void write_bar_plot_csv(std::ostream& out, std::span<const double> importances,
                        std::span<const std::string> feature_names);

/// CSV (sensor,mean,std,min,max).
void write_sensor_csv(std::ostream& out, const std::vector<SensorInfluence>& sensors);

}  // namespace lionets
