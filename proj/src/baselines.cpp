#include "lionets/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lionets/errors.hpp"
#include "lionets/lionets.hpp"

namespace lionets::baselines {

std::vector<LimeMask> sample_lime_masks(std::size_t active_features, std::size_t num_samples,
                                        Rng& rng) {
    if (active_features == 0) throw DegenerateInputError("LIME needs at least one active feature");
    if (num_samples == 0) throw DomainError("LIME needs at least one sample");
    std::vector<LimeMask> masks;
    masks.reserve(num_samples);
    masks.emplace_back(active_features, true);

    std::uniform_int_distribution<std::size_t> how_many(1, active_features);
    std::vector<std::size_t> order(active_features);
    while (masks.size() < num_samples) {
        const std::size_t zeroed = how_many(rng);
        std::iota(order.begin(), order.end(), 0);
        // Partial Fisher-Yates: the first `zeroed` slots form a uniform subset.
        for (std::size_t i = 0; i < zeroed; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, active_features - 1);
            std::swap(order[i], order[pick(rng)]);
        }
        LimeMask mask(active_features, true);
        for (std::size_t i = 0; i < zeroed; ++i) mask[order[i]] = false;
        masks.push_back(std::move(mask));
    }
    return masks;
}

LimeResult lime_text_explain(const MLPModel& predictor, std::span<const double> instance,
                             const LimeConfig& cfg) {
    if (instance.size() != predictor.input_dim) {
        throw DimensionError("instance length does not match the predictor input");
    }
    require_finite(instance, "instance");
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < instance.size(); ++j) {
        if (instance[j] != 0.0) active.push_back(j);
    }
    if (active.empty()) throw DegenerateInputError("LIME cannot explain an all-zero instance");

    Rng rng(cfg.seed);
    const auto masks = sample_lime_masks(active.size(), cfg.num_samples, rng);

    LimeResult r;
    const std::size_t n = masks.size();
    r.samples = Matrix(n, instance.size());
    Matrix design(n, active.size());
    r.predictions.resize(n);
    r.weights.resize(n);
    const double instance_norm = l2_norm(instance);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = r.samples.row(i);
        double overlap = 0.0, norm_sq = 0.0;
        for (std::size_t a = 0; a < active.size(); ++a) {
            const double v = masks[i][a] ? instance[active[a]] : 0.0;
            row[active[a]] = v;
            design(i, a) = v;
            overlap += v * instance[active[a]];
            norm_sq += v * v;
        }
        r.predictions[i] = predicted_value(predictor, row, cfg.target_output);
        // An all-zeroed sample has no direction; it gets similarity 0.
        const double similarity = norm_sq > 0.0 ? overlap / (std::sqrt(norm_sq) * instance_norm) : 0.0;
        r.weights[i] = 1000.0 * similarity;
    }

    const RidgeFit fit = weighted_ridge_fit(design, r.predictions, r.weights, cfg.alpha);
    r.surrogate_predictions.resize(n);
    double abs_err = 0.0, mean_f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r.surrogate_predictions[i] = fit.predict(design.row(i));
        abs_err += std::abs(r.surrogate_predictions[i] - r.predictions[i]);
        mean_f += r.predictions[i];
    }
    mean_f /= static_cast<double>(n);

    Explanation& e = r.explanation;
    e.explainer = "lime";
    e.importances.assign(instance.size(), 0.0);
    for (std::size_t a = 0; a < active.size(); ++a) e.importances[active[a]] = fit.coefficients[a];
    e.intercept = fit.intercept;
    e.local_prediction = fit.intercept + dot(e.importances, instance);
    e.model_prediction = predicted_value(predictor, instance, cfg.target_output);
    e.chosen_alpha = cfg.alpha;
    e.seed = cfg.seed;
    e.fidelity_mae = abs_err / static_cast<double>(n);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ss_res += std::pow(r.predictions[i] - r.surrogate_predictions[i], 2);
        ss_tot += std::pow(r.predictions[i] - mean_f, 2);
    }
    if (n >= 2 && ss_tot > 0.0) e.fidelity_r2 = 1.0 - ss_res / ss_tot;
    return r;
}

Explanation gradient_x_input_explain(const MLPModel& predictor, std::span<const double> instance,
                                     std::size_t output_index) {
    const Vec grad = gradient_wrt_input(predictor, instance, output_index);
    Explanation e;
    e.explainer = "gxi";
    e.importances.resize(instance.size());
    for (std::size_t j = 0; j < instance.size(); ++j) e.importances[j] = grad[j] * instance[j];
    e.model_prediction = predicted_value(predictor, instance, output_index);
    e.intercept = e.model_prediction - dot(e.importances, instance);
    e.local_prediction = e.intercept + dot(e.importances, instance);
    return e;
}

}  // namespace lionets::baselines
