#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lionets {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Matrix from_rows(const std::vector<Vec>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return values_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

    /// Appends a row; the first row appended to an empty matrix fixes the column count.
    void append_row(std::span<const double> values);

    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Per-dimension distribution summary used to draw latent neighbours.
struct FeatureStat {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double std = 0.0;

    friend bool operator==(const FeatureStat&, const FeatureStat&) = default;
};

using FeatureStats = std::vector<FeatureStat>;

struct RidgeFit {
    Vec coefficients;
    double intercept = 0.0;
    double alpha = 0.0;

    double predict(std::span<const double> x) const;
};

/// Throws DomainError when any entry is NaN or infinite.
void require_finite(std::span<const double> values, const char* what);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// 1 - cos(a, b), clamped to [0, 2]. Throws DegenerateInputError if either vector is all zero.
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// Locality kernel applied to latent-space distances:
/// ln(D) * exp(-distance * ln(D) / 2) with D = max(latent_dim, 100).
double kernel_weight(double distance, std::size_t latent_dim);

/// Weighted ridge regression with weighted-mean centering; the intercept is not penalised.
///
/// Solves (Xc' W Xc + alpha I) beta = Xc' W yc by Cholesky. With alpha == 0 a singular
/// Gram matrix raises RankDeficiencyError; with alpha > 0 a numerically failed
/// factorisation is retried once with 1e-10 added to the diagonal.
RidgeFit weighted_ridge_fit(const Matrix& x, std::span<const double> y,
                            std::span<const double> sample_weights, double alpha);

/// One weighted ridge fit per alpha, sharing the centred Gram matrix.
std::vector<RidgeFit> weighted_ridge_path(const Matrix& x, std::span<const double> y,
                                          std::span<const double> sample_weights,
                                          std::span<const double> alphas);

/// Per-column min, max, mean and population standard deviation.
FeatureStats compute_feature_stats(const Matrix& x);

/// Solves the symmetric positive-definite system a * x = b in place of b.
/// Returns false if a non-positive pivot (relative to `relative_tolerance` times the
/// original diagonal entry) is met.
bool cholesky_solve(std::vector<double> a, std::size_t n, std::vector<double>& b,
                    double relative_tolerance = 0.0);

}  // namespace lionets
