#include "lionets/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lionets/baselines.hpp"
#include "lionets/csv.hpp"
#include "lionets/errors.hpp"

namespace lionets {

Matrix gaussian_column_neighbours(std::span<const double> instance, const FeatureStats& input_stats,
                                  std::size_t count, Rng& rng) {
    if (input_stats.size() != instance.size()) {
        throw DimensionError("input stats length does not match the instance");
    }
    std::normal_distribution<double> unit(0.0, 1.0);
    Matrix out(count, instance.size());
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < instance.size(); ++j) {
            out(i, j) = instance[j] + input_stats[j].std * unit(rng);
        }
    }
    return out;
}

Matrix lime_mask_neighbours(std::span<const double> instance, std::size_t count, Rng& rng) {
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < instance.size(); ++j) {
        if (instance[j] != 0.0) active.push_back(j);
    }
    const auto masks = baselines::sample_lime_masks(active.size(), count, rng);
    Matrix out(count, instance.size());
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t a = 0; a < active.size(); ++a) {
            if (masks[i][a]) out(i, active[a]) = instance[active[a]];
        }
    }
    return out;
}

std::vector<HistogramBin> histogram(const std::string& series, std::span<const double> sample,
                                    std::size_t bins) {
    if (bins == 0) throw DomainError("histogram needs at least one bin");
    double top = 0.0;
    for (double v : sample) top = std::max(top, v);
    const double width = top > 0.0 ? top / static_cast<double>(bins) : 1.0 / static_cast<double>(bins);
    std::vector<HistogramBin> out(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b] = {series, width * static_cast<double>(b), width * static_cast<double>(b + 1), 0};
    }
    for (double v : sample) {
        auto b = static_cast<std::size_t>(v / width);
        ++out[std::min(b, bins - 1)].count;
    }
    return out;
}

DistanceStudy distance_distributions(const MLPModel& predictor, const MLPModel& decoder,
                                     const FeatureStats& latent_stats,
                                     std::span<const double> instance,
                                     const Matrix& original_neighbours,
                                     const NeighbourhoodConfig& cfg, std::size_t bins) {
    if (original_neighbours.cols() != instance.size()) {
        throw DimensionError("original-space neighbours do not match the instance length");
    }
    if (decoder.input_dim != predictor.latent_dim() || decoder.output_dim() != predictor.input_dim) {
        throw DimensionError("decoder does not mirror the predictor");
    }
    const Vec h = encode(predictor, instance);
    DistanceStudy s;
    for (std::size_t i = 0; i < original_neighbours.rows(); ++i) {
        const auto row = original_neighbours.row(i);
        s.original.push_back(euclidean_distance(row, instance));
        s.original_encoded.push_back(euclidean_distance(encode(predictor, row), h));
    }
    Rng rng(cfg.seed);
    const Matrix latent = generate_neighbourhood(h, cfg.size, latent_stats, rng);
    for (std::size_t i = 0; i < latent.rows(); ++i) {
        s.latent_decoded.push_back(euclidean_distance(predict(decoder, latent.row(i)), instance));
        s.latent.push_back(euclidean_distance(latent.row(i), h));
    }
    for (const auto& [name, sample] :
         {std::pair<const char*, const Vec*>{"a", &s.original}, {"b", &s.original_encoded},
          {"c", &s.latent_decoded}, {"d", &s.latent}}) {
        const auto part = histogram(name, *sample, bins);
        s.histogram.insert(s.histogram.end(), part.begin(), part.end());
    }
    return s;
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins) {
    data::write_csv_row(out, {"series", "bin_low", "bin_high", "count"});
    for (const auto& b : bins) {
        data::write_csv_row(out, {b.series, data::format_double(b.low), data::format_double(b.high),
                                  std::to_string(b.count)});
    }
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("KS statistic needs two non-empty samples");
    Vec x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    return d;
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
    if (n == 0 || m == 0) throw DomainError("KS critical value needs non-empty samples");
    double c = 0.0;
    if (alpha == 0.1) {
        c = 1.224;
    } else if (alpha == 0.05) {
        c = 1.358;
    } else if (alpha == 0.01) {
        c = 1.628;
    } else {
        throw DomainError("KS critical value is tabulated for alpha 0.1, 0.05 and 0.01 only");
    }
    const double dn = static_cast<double>(n), dm = static_cast<double>(m);
    return c * std::sqrt((dn + dm) / (dn * dm));
}

Vec standardize(std::span<const double> sample) {
    if (sample.empty()) return {};
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= static_cast<double>(sample.size());
    double var = 0.0;
    for (double v : sample) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(sample.size()));
    Vec out(sample.size(), 0.0);
    if (sd > 0.0) {
        for (std::size_t i = 0; i < sample.size(); ++i) out[i] = (sample[i] - mean) / sd;
    }
    return out;
}

}  // namespace lionets
