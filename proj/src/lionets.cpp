#include "lionets/lionets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lionets/errors.hpp"

namespace lionets {

Similarity parse_similarity(std::string_view name) {
    if (name == "euclidean") return Similarity::euclidean;
    if (name == "cosine") return Similarity::cosine;
    throw DomainError("unknown similarity '" + std::string(name) + "'");
}

double predicted_value(const MLPModel& predictor, std::span<const double> x,
                       std::size_t target_output) {
    const Vec out = predict(predictor, x);
    if (target_output >= out.size()) {
        throw DimensionError("target output " + std::to_string(target_output) +
                             " out of range for output width " + std::to_string(out.size()));
    }
    return out[target_output];
}

namespace {

double weighted_mae(std::span<const double> f, std::span<const double> g,
                    std::span<const double> w) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        num += w[i] * std::abs(f[i] - g[i]);
        den += w[i];
    }
    return num / den;
}

}  // namespace

LocalExplanation explain(const MLPModel& predictor, const MLPModel& decoder,
                         const FeatureStats& stats, std::span<const double> instance,
                         const NeighbourhoodConfig& cfg) {
    const std::size_t latent_dim = predictor.latent_dim();
    if (decoder.input_dim != latent_dim) {
        throw DimensionError("decoder input width " + std::to_string(decoder.input_dim) +
                             " != predictor latent width " + std::to_string(latent_dim));
    }
    if (decoder.output_dim() != predictor.input_dim) {
        throw DimensionError("decoder output width " + std::to_string(decoder.output_dim()) +
                             " != predictor input width " + std::to_string(predictor.input_dim));
    }
    if (cfg.alpha_grid.empty()) throw DomainError("alpha grid must not be empty");
    require_finite(instance, "instance");

    Rng rng(cfg.seed);
    const Vec encoded = encode(predictor, instance);

    LocalExplanation result;
    Neighbourhood& nb = result.neighbourhood;
    nb.latent = generate_neighbourhood(encoded, cfg.size, stats, rng);
    nb.first_order_count = first_order_count(latent_dim, cfg.size);
    nb.decoded = predict_rows(decoder, nb.latent);

    const std::size_t n = nb.latent.rows();
    nb.predictions.resize(n);
    nb.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        nb.predictions[i] = predicted_value(predictor, nb.decoded.row(i), cfg.target_output);
        const double d = cfg.similarity == Similarity::euclidean
                             ? euclidean_distance(encoded, nb.latent.row(i))
                             : cosine_distance(encoded, nb.latent.row(i));
        nb.weights[i] = kernel_weight(d, latent_dim);
    }

    const auto fits = weighted_ridge_path(nb.decoded, nb.predictions, nb.weights, cfg.alpha_grid);
    std::size_t best = 0;
    double best_mae = 0.0;
    Vec surrogate(n);
    for (std::size_t k = 0; k < fits.size(); ++k) {
        for (std::size_t i = 0; i < n; ++i) surrogate[i] = fits[k].predict(nb.decoded.row(i));
        const double mae = weighted_mae(nb.predictions, surrogate, nb.weights);
        if (k == 0 || mae < best_mae) {
            best = k;
            best_mae = mae;
            nb.surrogate_predictions = surrogate;
        }
    }
    const RidgeFit& fit = fits[best];

    Explanation& e = result.explanation;
    e.explainer = "lionets";
    e.importances = fit.coefficients;
    e.intercept = fit.intercept;
    e.local_prediction = fit.predict(instance);
    e.model_prediction = predicted_value(predictor, instance, cfg.target_output);
    e.chosen_alpha = fit.alpha;
    e.seed = cfg.seed;

    double abs_err = 0.0, mean_f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        abs_err += std::abs(nb.surrogate_predictions[i] - nb.predictions[i]);
        mean_f += nb.predictions[i];
    }
    mean_f /= static_cast<double>(n);
    e.fidelity_mae = abs_err / static_cast<double>(n);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ss_res += std::pow(nb.predictions[i] - nb.surrogate_predictions[i], 2);
        ss_tot += std::pow(nb.predictions[i] - mean_f, 2);
    }
    if (n >= 2 && ss_tot > 0.0) e.fidelity_r2 = 1.0 - ss_res / ss_tot;
    return result;
}

CounterfactualReport counterfactual_features(const Explanation& expl,
                                             std::span<const double> instance,
                                             std::size_t top_k) {
    if (top_k == 0) throw DomainError("top_k must be at least 1");
    if (instance.size() != expl.importances.size()) {
        throw DimensionError("instance and explanation lengths differ");
    }
    CounterfactualReport report;
    for (std::size_t f = 0; f < instance.size(); ++f) {
        const double z = expl.importances[f];
        if (!is_nonzero_importance(z)) continue;
        auto& side = instance[f] != 0.0 ? report.present : report.absent;
        side.push_back({f, z});
    }
    auto by_magnitude = [](const FeatureWeight& a, const FeatureWeight& b) {
        const double ma = std::abs(a.importance), mb = std::abs(b.importance);
        return ma != mb ? ma > mb : a.feature < b.feature;
    };
    std::stable_sort(report.present.begin(), report.present.end(), by_magnitude);
    std::stable_sort(report.absent.begin(), report.absent.end(), by_magnitude);
    for (const auto& fw : report.absent) {
        if (fw.importance > 0.0 && !report.top_positive) report.top_positive = fw;
        if (fw.importance < 0.0 && !report.top_negative) report.top_negative = fw;
    }
    if (report.absent.size() > top_k) report.absent.resize(top_k);
    return report;
}

std::vector<SensorInfluence> aggregate_sensor_importance(std::span<const double> importances,
                                                         std::size_t window, std::size_t sensors) {
    if (window == 0 || sensors == 0 || window * sensors != importances.size()) {
        throw DimensionError("cannot view " + std::to_string(importances.size()) +
                             " importances as " + std::to_string(window) + " x " +
                             std::to_string(sensors));
    }
    std::vector<SensorInfluence> out(sensors);
    for (std::size_t s = 0; s < sensors; ++s) {
        auto& agg = out[s];
        agg.min = agg.max = importances[s];
        double sum = 0.0;
        for (std::size_t t = 0; t < window; ++t) {
            const double v = importances[t * sensors + s];
            agg.min = std::min(agg.min, v);
            agg.max = std::max(agg.max, v);
            sum += v;
        }
        agg.mean = sum / static_cast<double>(window);
        double sq = 0.0;
        for (std::size_t t = 0; t < window; ++t) {
            sq += std::pow(importances[t * sensors + s] - agg.mean, 2);
        }
        agg.std = std::sqrt(sq / static_cast<double>(window));
    }
    return out;
}

}  // namespace lionets
