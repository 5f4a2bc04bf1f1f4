#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lionets/lionets.hpp"
#include "lionets/neighbourhood.hpp"
#include "lionets/neural.hpp"

namespace lionets {

/// Dense original-space neighbours: instance + N(0, std_j) per column.
Matrix gaussian_column_neighbours(std::span<const double> instance, const FeatureStats& input_stats,
                                  std::size_t count, Rng& rng);

/// Sparse original-space neighbours: LIME-style masks over the non-zero features.
Matrix lime_mask_neighbours(std::span<const double> instance, std::size_t count, Rng& rng);

struct HistogramBin {
    std::string series;
    double low = 0.0;
    double high = 0.0;
    std::size_t count = 0;
};

/// Euclidean distance samples of the latent-geometry study.
struct DistanceStudy {
    Vec original;          // (a) original-space neighbours vs instance
    Vec original_encoded;  // (b) the same neighbours encoded, vs encoded instance
    Vec latent_decoded;    // (c) latent neighbours decoded, vs instance
    Vec latent;            // (d) latent neighbours vs encoded instance
    std::vector<HistogramBin> histogram;
};

/// `bins` equal-width bins over [0, max] of the sample; the last bin is closed.
std::vector<HistogramBin> histogram(const std::string& series, std::span<const double> sample,
                                    std::size_t bins);

DistanceStudy distance_distributions(const MLPModel& predictor, const MLPModel& decoder,
                                     const FeatureStats& latent_stats,
                                     std::span<const double> instance,
                                     const Matrix& original_neighbours,
                                     const NeighbourhoodConfig& cfg, std::size_t bins = 20);

void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins);

/// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Large-sample critical value c(alpha) sqrt((n + m) / (n m)) for alpha in {0.1, 0.05, 0.01}.
double ks_critical_value(std::size_t n, std::size_t m, double alpha = 0.05);

/// (x - mean) / std; a constant sample maps to zeros.
Vec standardize(std::span<const double> sample);

}  // namespace lionets
