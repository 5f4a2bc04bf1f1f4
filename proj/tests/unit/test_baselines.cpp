#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "lionets/baselines.hpp"
#include "lionets/errors.hpp"

using namespace lionets;
using namespace lionets::baselines;

TEST_CASE("lime masks") {
    Rng rng(1);
    const auto masks = sample_lime_masks(6, 5000, rng);
    REQUIRE(masks.size() == 5000);
    CHECK(masks[0] == LimeMask(6, true));
    std::set<LimeMask> distinct(masks.begin(), masks.end());
    CHECK(distinct.size() == 64);
    for (std::size_t i = 1; i < masks.size(); ++i)
        CHECK(std::count(masks[i].begin(), masks[i].end(), false) >= 1);
    CHECK_THROWS_AS(sample_lime_masks(0, 10, rng), DegenerateInputError);
}

TEST_CASE("lime recovers a linear predictor on present features") {
    const Vec w{0.4, -0.3, 0.0, 0.8, 0.2, -0.6, 0.5, 0.1, -0.9, 0.3};
    const auto predictor = testutil::linear_head(w, 0.1, Activation::linear);
    const Vec x{0.5, 0, 0.3, 0.2, 0, 0.6, 0, 0.4, 0.1, 0};
    LimeConfig cfg;
    cfg.seed = 3;
    const auto result = lime_text_explain(predictor, x, cfg);
    const auto& z = result.explanation.importances;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] == 0.0) {
            CHECK(z[j] == 0.0);
        } else {
            CHECK(std::abs(z[j] - w[j]) <= 0.05 * std::max(std::abs(w[j]), 0.05));
        }
    }
    CHECK(result.weights[0] == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(result.samples.rows() == 5000);
    CHECK(result.explanation.fidelity_mae.has_value());
    CHECK(result.explanation.chosen_alpha == 1.0);

    const auto again = lime_text_explain(predictor, x, cfg);
    CHECK(again.explanation.importances == z);
}

TEST_CASE("lime on a nonlinear net leaves absent features at zero") {
    const LayerSpec specs[] = {{6, Activation::relu}, {3, Activation::tanh}, {1, Activation::sigmoid}};
    const auto predictor = make_mlp(8, specs, Task::binary_classification, 4);
    const Vec x{0, 0.7, 0, 0, 0.2, 0.7, 0, 0};
    LimeConfig cfg;
    cfg.num_samples = 300;
    const auto z = lime_text_explain(predictor, x, cfg).explanation.importances;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (x[j] == 0.0) CHECK(z[j] == 0.0);
    CHECK_THROWS_AS(lime_text_explain(predictor, Vec(8, 0.0), cfg), DegenerateInputError);
}

TEST_CASE("gradient x input") {
    const Vec w{2, -1, 0.5};
    const auto linear = testutil::linear_head(w, 0.3, Activation::linear);
    const Vec x{1, 4, -2};
    const auto e = gradient_x_input_explain(linear, x);
    for (std::size_t j = 0; j < 3; ++j) CHECK(e.importances[j] == doctest::Approx(w[j] * x[j]));
    CHECK_FALSE(e.fidelity_mae.has_value());
    CHECK(e.local_prediction == doctest::Approx(e.model_prediction));
    CHECK(e.intercept + dot(e.importances, x) == doctest::Approx(e.model_prediction));

    const auto zero = gradient_x_input_explain(linear, Vec(3, 0.0));
    for (double v : zero.importances) CHECK(v == 0.0);
}

TEST_CASE("gradient x input on a relu net sums active paths") {
    const LayerSpec specs[] = {{5, Activation::relu}, {1, Activation::linear}};
    const auto net = make_mlp(3, specs, Task::regression, 12);
    const Vec x{0.4, -0.8, 0.6};
    const auto& l1 = net.layers[0];
    const auto& l2 = net.layers[1];
    Vec brute(3, 0.0);
    for (std::size_t h = 0; h < 5; ++h) {
        double pre = l1.bias[h];
        for (std::size_t j = 0; j < 3; ++j) pre += l1.weights(h, j) * x[j];
        if (pre <= 0.0) continue;
        for (std::size_t j = 0; j < 3; ++j) brute[j] += l2.weights(0, h) * l1.weights(h, j);
    }
    const auto e = gradient_x_input_explain(net, x);
    for (std::size_t j = 0; j < 3; ++j) CHECK(e.importances[j] == doctest::Approx(brute[j] * x[j]));
}
