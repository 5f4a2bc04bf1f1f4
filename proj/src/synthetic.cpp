#include "lionets/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lionets/errors.hpp"

namespace lionets::data {

namespace {

void min_max_scale_columns(Matrix& m) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double lo = m(0, j), hi = m(0, j);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            lo = std::min(lo, m(i, j));
            hi = std::max(hi, m(i, j));
        }
        const double span = hi - lo;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            m(i, j) = span > 0.0 ? (m(i, j) - lo) / span : 0.0;
        }
    }
}

}  // namespace

DenseDataset synth_classification(std::size_t n, std::size_t features, std::uint64_t seed) {
    if (n < 2 || features < 2) throw DomainError("synthetic classification needs n >= 2 and features >= 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    const std::size_t informative = std::max<std::size_t>(2, features / 2);
    Vec centre(informative);
    for (double& c : centre) c = (unit(rng) < 0.0 ? -1.0 : 1.0) * 1.2;
    Matrix mixing(features - std::min(features, informative), informative);
    for (double& w : mixing.values()) w = unit(rng);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    DenseDataset ds;
    ds.features = Matrix(n, features);
    ds.labels.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = order[k];
        const double label = k < n / 2 ? 1.0 : -1.0;
        ds.labels[i] = label;
        auto row = ds.features.row(i);
        for (std::size_t j = 0; j < informative && j < features; ++j) {
            row[j] = label * centre[j] + gauss(rng);
        }
        for (std::size_t r = 0; r < mixing.rows(); ++r) {
            double v = 0.0;
            for (std::size_t j = 0; j < informative; ++j) v += mixing(r, j) * row[j];
            row[informative + r] = v + 0.1 * gauss(rng);
        }
    }
    min_max_scale_columns(ds.features);
    return ds;
}

std::vector<UnitSeries> synth_degradation(std::size_t units, std::size_t sensors,
                                          std::uint64_t seed) {
    if (units < 1 || sensors < 1) throw DomainError("synthetic degradation needs units >= 1 and sensors >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> lifetime(120, 250);
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    struct SensorModel {
        double direction, amplitude, exponent, noise;
    };
    std::vector<SensorModel> models(sensors);
    for (auto& m : models) {
        m.direction = unit01(rng) < 0.5 ? -1.0 : 1.0;
        m.amplitude = 0.5 + unit01(rng);
        m.exponent = 1.5 + 1.5 * unit01(rng);
        m.noise = 0.05 + 0.1 * unit01(rng);
    }

    std::vector<UnitSeries> out(units);
    for (std::size_t u = 0; u < units; ++u) {
        auto& series = out[u];
        series.unit = static_cast<int>(u + 1);
        const int life = lifetime(rng);
        series.readings = Matrix(static_cast<std::size_t>(life), sensors);
        Vec offset(sensors);
        for (double& o : offset) o = 0.1 * gauss(rng);
        for (int t = 1; t <= life; ++t) {
            series.timesteps.push_back(t);
            series.rul.push_back(static_cast<double>(life - t));
            const double progress = static_cast<double>(t) / life;
            auto row = series.readings.row(static_cast<std::size_t>(t - 1));
            for (std::size_t s = 0; s < sensors; ++s) {
                const auto& m = models[s];
                row[s] = offset[s] + m.direction * m.amplitude * std::pow(progress, m.exponent) +
                         m.noise * gauss(rng);
            }
        }
    }

    for (std::size_t s = 0; s < sensors; ++s) {
        double lo = out[0].readings(0, s), hi = lo;
        for (const auto& series : out) {
            for (std::size_t t = 0; t < series.readings.rows(); ++t) {
                lo = std::min(lo, series.readings(t, s));
                hi = std::max(hi, series.readings(t, s));
            }
        }
        const double span = hi - lo;
        for (auto& series : out) {
            for (std::size_t t = 0; t < series.readings.rows(); ++t) {
                series.readings(t, s) = span > 0.0 ? (series.readings(t, s) - lo) / span : 0.0;
            }
        }
    }
    return out;
}

const std::vector<std::string>& spam_cue_words() {
    static const std::vector<std::string> words = {
        "free",  "win",    "prize",   "cash",  "claim",   "urgent", "offer", "call",
        "txt",   "award",  "bonus",    "winner", "mobile", "reply",  "congrat", "reward",
        "voucher", "discount", "entry", "ringtone", "credit", "unlock", "deal", "sale",
    };
    return words;
}

const std::vector<std::string>& ham_cue_words() {
    static const std::vector<std::string> words = {
        "home",  "later", "dinner", "mum",  "sorry",    "meet",  "tonight", "love",
        "friend", "lunch", "class", "sleep", "tomorrow", "busy", "watch",   "teach",
        "colleg", "movie", "game",  "work",  "bed",     "cook",  "laugh",   "miss",
    };
    return words;
}

const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words = {
        "the",   "you",   "to",    "and",    "is",    "me",    "it",    "for",   "on",    "at",
        "this",  "that",  "now",   "get",    "go",    "day",   "can",   "will",  "just",  "know",
        "what",  "when",  "how",   "your",   "my",    "we",    "they",  "he",    "she",   "our",
        "not",   "but",   "or",    "if",     "so",    "all",   "any",   "one",   "two",   "new",
        "good",  "time",  "back",  "here",   "there", "out",   "up",    "down",  "over",  "from",
        "with",  "about", "more",  "some",   "only",  "also",  "then",  "than",  "too",   "very",
        "still", "well",  "make",  "take",   "see",   "come",  "want",  "need",  "let",   "tell",
        "ask",   "give",  "find",  "think",  "look",  "feel",  "try",   "keep",  "put",   "say",
        "week",  "month", "year",  "today",  "soon",  "again", "next",  "last",  "first", "great",
        "nice",  "okay",  "yeah",  "sure",   "maybe", "really", "right", "place", "phone", "number",
        "text",  "word",  "thing", "life",   "world", "people", "way",   "man",   "car",   "town",
    };
    return words;
}

std::vector<LabelledText> synth_text_corpus(std::size_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("corpus size must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> length(6, 12);
    const auto& spam = spam_cue_words();
    const auto& ham = ham_cue_words();
    const auto& filler = filler_words();
    auto pick = [&](const std::vector<std::string>& pool) -> const std::string& {
        return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    };

    std::vector<LabelledText> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        LabelledText doc;
        doc.label = unit01(rng) < 0.4 ? 1 : 0;
        const double own = 0.25, other = 0.08;
        const std::size_t len = length(rng);
        for (std::size_t w = 0; w < len; ++w) {
            const double r = unit01(rng);
            const auto& pool = r < own ? (doc.label ? spam : ham)
                               : r < own + other ? (doc.label ? ham : spam)
                                                 : filler;
            if (!doc.text.empty()) doc.text.push_back(' ');
            doc.text += pick(pool);
        }
        if (unit01(rng) < 0.3) doc.text += doc.label ? "!" : ".";
        out.push_back(std::move(doc));
    }
    return out;
}

}  // namespace lionets::data
