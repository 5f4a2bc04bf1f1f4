#include <doctest.h>

#include <sstream>

#include "lionets/errors.hpp"
#include "lionets/metrics.hpp"
#include "lionets/numerics.hpp"

using namespace lionets;
using namespace lionets::metrics;

TEST_CASE("fidelity") {
    const Vec f{0.2, 0.8, 0.5};
    const auto same = fidelity(f, f);
    CHECK(same.fidelity == 1.0);
    CHECK(same.r2 == 1.0);

    const auto pair = fidelity(Vec{0.2, 0.8}, Vec{0.3, 0.6});
    CHECK(pair.fidelity == doctest::Approx(0.85));
    CHECK(pair.mae == doctest::Approx(0.15));

    const auto constant = fidelity(f, Vec(3, 0.5));
    CHECK(*constant.r2 == doctest::Approx(0.0).epsilon(1e-12));

    CHECK(fidelity(Vec{0.5, 0.5}, Vec{0.4, 0.6}).r2 == std::nullopt);
    CHECK(fidelity(Vec{0.5}, Vec{0.4}).r2 == std::nullopt);

    const auto p1 = fidelity(Vec{0.1, 0.9, 0.4}, Vec{0.2, 0.7, 0.4});
    const auto p2 = fidelity(Vec{0.4, 0.1, 0.9}, Vec{0.4, 0.2, 0.7});
    CHECK(p1.fidelity == doctest::Approx(p2.fidelity));
    CHECK(*p1.r2 == doctest::Approx(*p2.r2));
    CHECK_THROWS_AS(fidelity(Vec{1}, Vec{1, 2}), DimensionError);
}

TEST_CASE("average non-zero weights") {
    CHECK(avg_nonzero(std::vector<Vec>{{1, 2, 3, 0, 0}, {1, 1, 1, 1, 1}}) == 4.0);
    CHECK(avg_nonzero(std::vector<Vec>{{0, 0}, {0, 0}}) == 0.0);
    CHECK(avg_nonzero(std::vector<Vec>{Vec(700, 0.1)}) == 700.0);
    Explanation e;
    e.importances = {0, 1e-13, 2};
    CHECK(avg_nonzero(std::vector<Explanation>{e}) == 1.0);
}

TEST_CASE("relaxed robustness") {
    const std::vector<Vec> instances{{1, 2}, {0.5, 3}};
    const ExplainFn constant = [](std::span<const double>) { return Vec{0.3, -0.2}; };
    CHECK(relaxed_robustness(constant, instances, PerturbationMode::dense, Vec{1, 1}).score == 0.0);
    CHECK(relaxed_robustness(constant, instances, PerturbationMode::text).score == 0.0);

    const Vec orig{1, 2};
    const ExplainFn two_state = [&](std::span<const double> x) {
        return Vec(x.begin(), x.end()) == orig ? Vec{1, 2} : Vec{1, 1};
    };
    const auto hand = relaxed_robustness(two_state, {orig}, PerturbationMode::dense, Vec{0.5, 0.5});
    CHECK(hand.score == doctest::Approx(0.5));
    CHECK(hand.evaluated == 1);

    const ExplainFn identity = [](std::span<const double> x) { return Vec(x.begin(), x.end()); };
    const Vec stds{0.2, 0.4, 0.1};
    const auto id = relaxed_robustness(identity, {{3, 1, 2}}, PerturbationMode::dense, stds);
    CHECK(id.score == doctest::Approx(0.4 / 3.0));

    const ExplainFn flaky = [&](std::span<const double> x) {
        if (Vec(x.begin(), x.end()) != orig) throw DegenerateInputError("no");
        return Vec{1, 2};
    };
    const auto skipped = relaxed_robustness(flaky, {orig}, PerturbationMode::dense, Vec{1, 1});
    CHECK(skipped.skipped == 1);
    CHECK(skipped.evaluated == 0);
}

TEST_CASE("faithfulness") {
    const ExplainFn explainer = [](std::span<const double>) { return Vec{0.5, 0.1}; };
    const PredictFn drop = [](std::span<const double> x) { return x[0] == 0.0 ? 0.6 : 0.9; };
    const auto r = faithfulness(drop, explainer, {{1, 1}});
    CHECK(r.score == doctest::Approx(0.3));
    CHECK(r.evaluated == 1);

    const PredictFn flat = [](std::span<const double>) { return 0.42; };
    CHECK(faithfulness(flat, explainer, {{1, 1}, {0.3, 0.2}}).score == 0.0);

    const PredictFn rise = [](std::span<const double> x) { return x[0] == 0.0 ? 0.8 : 0.5; };
    CHECK(faithfulness(rise, explainer, {{1, 1}}).score == doctest::Approx(-0.3));

    const ExplainFn negative = [](std::span<const double>) { return Vec{-0.5, -0.1}; };
    const auto none = faithfulness(drop, negative, {{1, 1}});
    CHECK(none.skipped == 1);
    CHECK(none.evaluated == 0);
}

TEST_CASE("altruist") {
    const Vec w{0.5, -1.0, 2.0, 0.3, -0.7};
    const PredictFn linear = [&](std::span<const double> x) { return dot(w, x); };
    const std::vector<Vec> instances{{1, 2, 3, 4, 5}, {0.5, 0.1, 0.2, 0.9, 0.3}};
    AltruistGrouping g;
    g.feature_std = Vec(5, 1.0);

    const ExplainFn oracle = [&](std::span<const double>) { return w; };
    const auto truthful = altruist_untruthfulness(linear, oracle, instances, g);
    CHECK(truthful.mean_pct == 0.0);
    CHECK(truthful.instances == 2);

    const ExplainFn flipped = [&](std::span<const double>) {
        Vec v = w;
        for (auto& c : v) c = -c;
        return v;
    };
    CHECK(altruist_untruthfulness(linear, flipped, instances, g).mean_pct == 100.0);

    const ExplainFn two_wrong = [&](std::span<const double>) {
        Vec v = w;
        v[1] = -v[1];
        v[3] = -v[3];
        return v;
    };
    const auto partial = altruist_untruthfulness(linear, two_wrong, instances, g);
    CHECK(partial.mean_count == 2.0);
    CHECK(partial.mean_pct == doctest::Approx(40.0));

    g.feature_std[2] = 0.0;
    const auto excluded = altruist_untruthfulness(linear, oracle, instances, g);
    CHECK(excluded.units_excluded == 2);
    CHECK(excluded.units_evaluated == 8);

    AltruistGrouping tokens;
    tokens.kind = AltruistGrouping::Kind::per_token;
    const std::vector<Vec> sparse{{1, 0, 3, 0, 5}};
    const auto tok = altruist_untruthfulness(linear, flipped, sparse, tokens);
    CHECK(tok.units_evaluated == 3);
    CHECK(tok.mean_pct == 100.0);

    AltruistGrouping sensors;
    sensors.kind = AltruistGrouping::Kind::per_sensor;
    sensors.window = 2;
    sensors.sensors = 2;
    sensors.sensor_std = {0.1, 0.1};
    const Vec ws{1, -1, 1, -1};
    const PredictFn series = [&](std::span<const double> x) { return dot(ws, x); };
    const ExplainFn series_oracle = [&](std::span<const double>) { return ws; };
    CHECK(altruist_untruthfulness(series, series_oracle, {{1, 2, 3, 4}}, sensors).mean_pct == 0.0);
}

TEST_CASE("report tables") {
    MetricReport lion{"lionets", "val", 0.01, 0.9, 4.0, 0.002, 0.1, 1.0, 25.0, 20};
    MetricReport gxi{"gxi", "val", std::nullopt, std::nullopt, 6.0, 0.5, 0.2, 2.0, 50.0, 20};
    std::ostringstream csv, md;
    write_report_csv(csv, {lion, gxi});
    write_report_markdown(md, {lion, gxi});
    CHECK(csv.str() ==
          "explainer,split,altruist_count,altruist_pct,relaxed_robustness,avg_nonzero,fidelity_mae,"
          "fidelity_r2,faithfulness,instances\n"
          "lionets,val,1,25,0.002,4,0.01,0.9,0.1,20\n"
          "gxi,val,2,50,0.5,6,,,0.2,20\n");
    CHECK(md.str() ==
          "| Explainer | Altruist (val) | Robustness (val) | NonZero (val) | Fidelity (mae) (val) |\n"
          "|---|---|---|---|---|\n"
          "| lionets | 25.00% | 2.00E-03 | 4.00 | 1.00E-02 |\n"
          "| gxi | 50.00% | 5.00E-01 | 6.00 | - |\n");
}
