#include "lionets/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "lionets/csv.hpp"
#include "lionets/errors.hpp"

namespace lionets::metrics {

FidelityScore fidelity(std::span<const double> f_preds, std::span<const double> g_preds) {
    if (f_preds.size() != g_preds.size()) throw DimensionError("fidelity: prediction lengths differ");
    if (f_preds.empty()) throw DimensionError("fidelity needs at least one prediction");
    const double n = static_cast<double>(f_preds.size());
    double abs_err = 0.0, mean_f = 0.0;
    for (std::size_t i = 0; i < f_preds.size(); ++i) {
        abs_err += std::abs(g_preds[i] - f_preds[i]);
        mean_f += f_preds[i];
    }
    mean_f /= n;
    FidelityScore s;
    s.mae = abs_err / n;
    s.fidelity = 1.0 - s.mae;
    if (f_preds.size() >= 2) {
        double ss_res = 0.0, ss_tot = 0.0;
        for (std::size_t i = 0; i < f_preds.size(); ++i) {
            ss_res += (f_preds[i] - g_preds[i]) * (f_preds[i] - g_preds[i]);
            ss_tot += (f_preds[i] - mean_f) * (f_preds[i] - mean_f);
        }
        if (ss_tot > 0.0) s.r2 = 1.0 - ss_res / ss_tot;
    }
    return s;
}

double avg_nonzero(const std::vector<Vec>& importances) {
    if (importances.empty()) throw DomainError("avg_nonzero needs at least one explanation");
    double total = 0.0;
    for (const auto& z : importances) {
        total += static_cast<double>(std::count_if(z.begin(), z.end(), is_nonzero_importance));
    }
    return total / static_cast<double>(importances.size());
}

double avg_nonzero(const std::vector<Explanation>& explanations) {
    std::vector<Vec> z;
    z.reserve(explanations.size());
    for (const auto& e : explanations) z.push_back(e.importances);
    return avg_nonzero(z);
}

namespace {

Vec checked_explain(const ExplainFn& explainer, std::span<const double> x) {
    Vec e = explainer(x);
    if (e.size() != x.size()) {
        throw DimensionError("explainer returned " + std::to_string(e.size()) +
                             " importances for " + std::to_string(x.size()) + " features");
    }
    return e;
}

}  // namespace

RobustnessResult relaxed_robustness(const ExplainFn& explainer, const std::vector<Vec>& instances,
                                    PerturbationMode mode, std::span<const double> feature_std) {
    RobustnessResult r;
    double total = 0.0;
    for (const auto& x : instances) {
        if (mode == PerturbationMode::dense && feature_std.size() != x.size()) {
            throw DimensionError("dense robustness needs one standard deviation per feature");
        }
        Vec original, tweaked_expl;
        try {
            original = checked_explain(explainer, x);
        } catch (const Error&) {
            ++r.skipped;
            continue;
        }
        std::optional<std::size_t> least;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (mode == PerturbationMode::text && x[j] == 0.0) continue;
            if (!is_nonzero_importance(original[j])) continue;
            if (!least || std::abs(original[j]) < std::abs(original[*least])) least = j;
        }
        if (!least) {
            ++r.skipped;
            continue;
        }
        Vec tweaked = x;
        if (mode == PerturbationMode::text) {
            tweaked[*least] = 0.0;
        } else {
            tweaked[*least] -= feature_std[*least];
        }
        try {
            tweaked_expl = checked_explain(explainer, tweaked);
        } catch (const Error&) {
            ++r.skipped;
            continue;
        }
        double diff = 0.0;
        std::size_t compared = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (mode == PerturbationMode::text && x[j] == 0.0 && tweaked[j] == 0.0) continue;
            diff += std::abs(original[j] - tweaked_expl[j]);
            ++compared;
        }
        total += compared ? diff / static_cast<double>(compared) : 0.0;
        ++r.evaluated;
    }
    r.score = r.evaluated ? total / static_cast<double>(r.evaluated) : 0.0;
    return r;
}

FaithfulnessResult faithfulness(const PredictFn& predictor, const ExplainFn& explainer,
                                const std::vector<Vec>& instances) {
    if (instances.empty()) throw DomainError("faithfulness needs at least one instance");
    FaithfulnessResult r;
    double total = 0.0;
    for (const auto& x : instances) {
        const Vec e = checked_explain(explainer, x);
        std::optional<std::size_t> top;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (x[j] == 0.0 || !(e[j] > kZeroImportance)) continue;
            if (!top || e[j] > e[*top]) top = j;
        }
        if (!top) {
            ++r.skipped;
            continue;
        }
        Vec tweaked = x;
        tweaked[*top] = 0.0;
        total += predictor(x) - predictor(tweaked);
        ++r.evaluated;
    }
    r.score = r.evaluated ? total / static_cast<double>(r.evaluated) : 0.0;
    return r;
}

namespace {

enum class Verdict { truthful, untruthful, excluded };

// z > 0 expects the prediction to follow the perturbation, z < 0 to oppose it.
Verdict judge(double z, double base, std::optional<double> raised, std::optional<double> lowered) {
    if (!is_nonzero_importance(z)) return Verdict::excluded;
    const double sign = z > 0.0 ? 1.0 : -1.0;
    if (raised && sign * (*raised - base) < 0.0) return Verdict::untruthful;
    if (lowered && sign * (*lowered - base) > 0.0) return Verdict::untruthful;
    return Verdict::truthful;
}

}  // namespace

AltruistResult altruist_untruthfulness(const PredictFn& predictor, const ExplainFn& explainer,
                                       const std::vector<Vec>& instances,
                                       const AltruistGrouping& grouping) {
    using Kind = AltruistGrouping::Kind;
    AltruistResult result;
    double count_total = 0.0, pct_total = 0.0;
    std::size_t pct_instances = 0;
    for (const auto& x : instances) {
        const Vec e = checked_explain(explainer, x);
        const double base = predictor(x);
        std::size_t untruthful = 0, evaluated = 0;
        auto tally = [&](Verdict v) {
            if (v == Verdict::excluded) {
                ++result.units_excluded;
                return;
            }
            ++evaluated;
            if (v == Verdict::untruthful) ++untruthful;
        };

        switch (grouping.kind) {
            case Kind::per_token:
                for (std::size_t j = 0; j < x.size(); ++j) {
                    if (x[j] == 0.0) continue;
                    Vec removed = x;
                    removed[j] = 0.0;
                    tally(judge(e[j], base, std::nullopt, predictor(removed)));
                }
                break;
            case Kind::per_feature:
                if (grouping.feature_std.size() != x.size()) {
                    throw DimensionError("per-feature Altruist needs one std per feature");
                }
                for (std::size_t j = 0; j < x.size(); ++j) {
                    const double step = grouping.feature_std[j];
                    if (!(step > 0.0) || !is_nonzero_importance(e[j])) {
                        tally(Verdict::excluded);
                        continue;
                    }
                    Vec up = x, down = x;
                    up[j] += step;
                    down[j] -= step;
                    tally(judge(e[j], base, predictor(up), predictor(down)));
                }
                break;
            case Kind::per_sensor: {
                const std::size_t w = grouping.window, s_count = grouping.sensors;
                if (w * s_count != x.size() || grouping.sensor_std.size() != s_count) {
                    throw DimensionError("per-sensor Altruist grouping does not match the instance");
                }
                for (std::size_t s = 0; s < s_count; ++s) {
                    const double step = grouping.sensor_std[s];
                    double z = 0.0;
                    for (std::size_t t = 0; t < w; ++t) z += e[t * s_count + s];
                    z /= static_cast<double>(w);
                    if (!(step > 0.0) || !is_nonzero_importance(z)) {
                        tally(Verdict::excluded);
                        continue;
                    }
                    Vec up = x, down = x;
                    for (std::size_t t = 0; t < w; ++t) {
                        up[t * s_count + s] += step;
                        down[t * s_count + s] -= step;
                    }
                    tally(judge(z, base, predictor(up), predictor(down)));
                }
                break;
            }
        }
        result.units_evaluated += evaluated;
        count_total += static_cast<double>(untruthful);
        if (evaluated) {
            pct_total += 100.0 * static_cast<double>(untruthful) / static_cast<double>(evaluated);
            ++pct_instances;
        }
        ++result.instances;
    }
    if (result.instances) result.mean_count = count_total / static_cast<double>(result.instances);
    if (pct_instances) result.mean_pct = pct_total / static_cast<double>(pct_instances);
    return result;
}

namespace {

std::string optional_field(const std::optional<double>& v) {
    return v ? data::format_double(*v) : std::string();
}

std::string scientific(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2E", v);
    return buf;
}

std::string fixed(double v, const char* fmt) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

}  // namespace

void write_report_csv(std::ostream& out, const std::vector<MetricReport>& reports) {
    data::write_csv_row(out, {"explainer", "split", "altruist_count", "altruist_pct",
                              "relaxed_robustness", "avg_nonzero", "fidelity_mae", "fidelity_r2",
                              "faithfulness", "instances"});
    for (const auto& r : reports) {
        data::write_csv_row(out, {r.explainer, r.split, data::format_double(r.altruist_count),
                                  data::format_double(r.altruist_pct),
                                  data::format_double(r.relaxed_robustness),
                                  data::format_double(r.avg_nonzero), optional_field(r.fidelity_mae),
                                  optional_field(r.fidelity_r2), data::format_double(r.faithfulness),
                                  std::to_string(r.instances)});
    }
}

void write_report_markdown(std::ostream& out, const std::vector<MetricReport>& reports) {
    std::vector<std::string> explainers, splits;
    for (const auto& r : reports) {
        if (std::find(explainers.begin(), explainers.end(), r.explainer) == explainers.end()) {
            explainers.push_back(r.explainer);
        }
        if (std::find(splits.begin(), splits.end(), r.split) == splits.end()) splits.push_back(r.split);
    }
    auto find = [&](const std::string& ex, const std::string& sp) -> const MetricReport* {
        for (const auto& r : reports) {
            if (r.explainer == ex && r.split == sp) return &r;
        }
        return nullptr;
    };

    const char* metrics[] = {"Altruist", "Robustness", "NonZero", "Fidelity (mae)"};
    out << "| Explainer |";
    for (const char* m : metrics) {
        for (const auto& sp : splits) out << ' ' << m << " (" << sp << ") |";
    }
    out << "\n|---|";
    for (std::size_t i = 0; i < std::size(metrics) * splits.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& ex : explainers) {
        out << "| " << ex << " |";
        for (std::size_t m = 0; m < std::size(metrics); ++m) {
            for (const auto& sp : splits) {
                const MetricReport* r = find(ex, sp);
                std::string cell = "-";
                if (r) {
                    switch (m) {
                        case 0: cell = fixed(r->altruist_pct, "%.2f%%"); break;
                        case 1: cell = scientific(r->relaxed_robustness); break;
                        case 2: cell = fixed(r->avg_nonzero, "%.2f"); break;
                        case 3: cell = r->fidelity_mae ? scientific(*r->fidelity_mae) : "-"; break;
                    }
                }
                out << ' ' << cell << " |";
            }
        }
        out << '\n';
    }
}

}  // namespace lionets::metrics
