#include "lionets/explanation_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "lionets/csv.hpp"
#include "lionets/errors.hpp"

namespace lionets {
namespace {

std::string feature_name(std::span<const std::string> names, std::size_t j) {
    return j < names.size() ? names[j] : std::to_string(j);
}

}  // namespace

nlohmann::json explanation_to_json(const ExplanationDocument& doc) {
    if (!doc.explanation) throw ValidationError("explanation document has no explanation");
    const Explanation& e = *doc.explanation;
    if (e.importances.size() != doc.instance.size()) {
        throw DimensionError("importances do not match the instance length");
    }
    if (!doc.feature_names.empty() && doc.feature_names.size() != doc.instance.size()) {
        throw DimensionError("feature names do not match the instance length");
    }
    nlohmann::json j;
    j["instance_id"] = doc.instance_id;
    j["explainer"] = e.explainer;
    j["model_prediction"] = e.model_prediction;
    j["local_prediction"] = e.local_prediction;
    j["intercept"] = e.intercept;
    if (e.fidelity_mae) j["fidelity_mae"] = *e.fidelity_mae;
    if (e.fidelity_r2) j["fidelity_r2"] = *e.fidelity_r2;
    j["alpha"] = e.chosen_alpha;
    j["seed"] = e.seed;

    auto& imp = j["importances"] = nlohmann::json::array();
    for (std::size_t f = 0; f < doc.instance.size(); ++f) {
        if (doc.sparse && doc.instance[f] == 0.0) continue;
        imp.push_back({{"feature", feature_name(doc.feature_names, f)},
                       {"index", f},
                       {"value", doc.instance[f]},
                       {"importance", e.importances[f]}});
    }
    auto& cf = j["counterfactuals"] = nlohmann::json::array();
    if (doc.counterfactuals) {
        for (const auto& w : doc.counterfactuals->absent) {
            cf.push_back({{"feature", feature_name(doc.feature_names, w.feature)},
                          {"index", w.feature},
                          {"importance", w.importance}});
        }
    }
    if (!doc.sensors.empty()) {
        auto& s = j["sensors"] = nlohmann::json::array();
        for (std::size_t i = 0; i < doc.sensors.size(); ++i) {
            const auto& v = doc.sensors[i];
            s.push_back({{"sensor", i},
                         {"mean", v.mean},
                         {"std", v.std},
                         {"min", v.min},
                         {"max", v.max}});
        }
    }
    return j;
}

void write_bar_plot_csv(std::ostream& out, std::span<const double> importances,
                        std::span<const std::string> feature_names) {
    std::vector<std::size_t> order(importances.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(importances[a]) > std::abs(importances[b]);
    });
    data::write_csv_row(out, {"feature", "importance"});
    for (std::size_t j : order) {
        data::write_csv_row(out, {feature_name(feature_names, j), data::format_double(importances[j])});
    }
}

void write_sensor_csv(std::ostream& out, const std::vector<SensorInfluence>& sensors) {
    data::write_csv_row(out, {"sensor", "mean", "std", "min", "max"});
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        const auto& s = sensors[i];
        data::write_csv_row(out, {std::to_string(i), data::format_double(s.mean),
                                  data::format_double(s.std), data::format_double(s.min),
                                  data::format_double(s.max)});
    }
}

}  // namespace lionets
