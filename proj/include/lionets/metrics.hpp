#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lionets/explanation.hpp"
#include "lionets/numerics.hpp"

namespace lionets::metrics {

using PredictFn = std::function<double(std::span<const double>)>;
/// Returns one importance per input feature.
using ExplainFn = std::function<Vec(std::span<const double>)>;

struct FidelityScore {
    double fidelity = 0.0;  // 1 - mean |g - f|
    double mae = 0.0;
    std::optional<double> r2;  // empty when f has zero variance or fewer than two points
};

FidelityScore fidelity(std::span<const double> f_preds, std::span<const double> g_preds);

/// Mean count of importances with |z| > 1e-12.
double avg_nonzero(const std::vector<Vec>& importances);
double avg_nonzero(const std::vector<Explanation>& explanations);

enum class PerturbationMode { text, dense };

struct RobustnessResult {
    double score = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
};

/// Tweaks each instance on its least important feature (zeroed in text mode, lowered by
/// that feature's std in dense mode), re-explains, and averages the mean elementwise
/// absolute change of the explanation. In text mode the comparison runs over the
/// features present in the original or tweaked instance.
RobustnessResult relaxed_robustness(const ExplainFn& explainer, const std::vector<Vec>& instances,
                                    PerturbationMode mode, std::span<const double> feature_std = {});

struct FaithfulnessResult {
    double score = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;  // no present feature with positive importance
};

/// Mean drop of the prediction after zeroing the present feature with the largest
/// positive importance.
FaithfulnessResult faithfulness(const PredictFn& predictor, const ExplainFn& explainer,
                                const std::vector<Vec>& instances);

struct AltruistGrouping {
    enum class Kind { per_token, per_sensor, per_feature };
    Kind kind = Kind::per_feature;
    Vec feature_std;            // per_feature
    std::size_t window = 0;     // per_sensor
    std::size_t sensors = 0;    // per_sensor
    Vec sensor_std;             // per_sensor
};

struct AltruistResult {
    double mean_count = 0.0;
    double mean_pct = 0.0;
    std::size_t instances = 0;
    std::size_t units_evaluated = 0;
    std::size_t units_excluded = 0;
};

/// Counts importances whose sign disagrees with the predictor's response when the unit
/// (token, sensor or feature) is perturbed.
AltruistResult altruist_untruthfulness(const PredictFn& predictor, const ExplainFn& explainer,
                                       const std::vector<Vec>& instances,
                                       const AltruistGrouping& grouping);

struct MetricReport {
    std::string explainer;
    std::string split;
    std::optional<double> fidelity_mae;
    std::optional<double> fidelity_r2;
    double avg_nonzero = 0.0;
    double relaxed_robustness = 0.0;
    double faithfulness = 0.0;
    double altruist_count = 0.0;
    double altruist_pct = 0.0;
    std::size_t instances = 0;
};

void write_report_csv(std::ostream& out, const std::vector<MetricReport>& reports);
void write_report_markdown(std::ostream& out, const std::vector<MetricReport>& reports);

}  // namespace lionets::metrics
