#include "lionets/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lionets/errors.hpp"

namespace lionets {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
        throw DimensionError("matrix " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                             " given " + std::to_string(values_.size()) + " values");
    }
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
    Matrix m;
    for (const auto& r : rows) m.append_row(r);
    return m;
}

void Matrix::append_row(std::span<const double> values) {
    if (rows_ == 0 && values_.empty()) {
        cols_ = values.size();
    } else if (values.size() != cols_) {
        throw DimensionError("row of length " + std::to_string(values.size()) +
                             " appended to matrix with " + std::to_string(cols_) + " columns");
    }
    values_.insert(values_.end(), values.begin(), values.end());
    ++rows_;
}

double RidgeFit::predict(std::span<const double> x) const {
    if (x.size() != coefficients.size()) {
        throw DimensionError("surrogate expects " + std::to_string(coefficients.size()) +
                             " features, got " + std::to_string(x.size()));
    }
    return intercept + dot(coefficients, x);
}

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) throw DomainError(std::string(what) + " contains a non-finite value");
    }
}

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("length mismatch: " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b);
    require_finite(a, "euclidean_distance operand");
    require_finite(b, "euclidean_distance operand");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b);
    require_finite(a, "cosine_distance operand");
    require_finite(b, "cosine_distance operand");
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) throw DegenerateInputError("cosine distance of a zero vector");
    return std::clamp(1.0 - dot(a, b) / (na * nb), 0.0, 2.0);
}

double kernel_weight(double distance, std::size_t latent_dim) {
    if (!(distance >= 0.0) || !std::isfinite(distance)) {
        throw DomainError("kernel distance must be finite and non-negative");
    }
    if (latent_dim == 0) throw DomainError("latent dimension must be at least 1");
    const double log_dims = std::log(static_cast<double>(std::max<std::size_t>(latent_dim, 100)));
    return std::exp(-distance * log_dims / 2.0) * log_dims;
}

bool cholesky_solve(std::vector<double> a, std::size_t n, std::vector<double>& b,
                    double relative_tolerance) {
    // In-place lower factor, then forward and back substitution.
    for (std::size_t j = 0; j < n; ++j) {
        const double original = a[j * n + j];
        double d = original;
        for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (!(d > relative_tolerance * std::abs(original)) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        a[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / ljj;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
        b[i] = s / a[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * b[k];
        b[ii] = s / a[ii * n + ii];
    }
    return true;
}

RidgeFit weighted_ridge_fit(const Matrix& x, std::span<const double> y,
                            std::span<const double> sample_weights, double alpha) {
    const double alphas[] = {alpha};
    return std::move(weighted_ridge_path(x, y, sample_weights, alphas).front());
}

std::vector<RidgeFit> weighted_ridge_path(const Matrix& x, std::span<const double> y,
                                          std::span<const double> sample_weights,
                                          std::span<const double> alphas) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (n == 0) throw DimensionError("ridge fit on an empty design matrix");
    if (y.size() != n || sample_weights.size() != n) {
        throw DimensionError("ridge fit: " + std::to_string(n) + " rows, " +
                             std::to_string(y.size()) + " targets, " +
                             std::to_string(sample_weights.size()) + " weights");
    }
    if (alphas.empty()) throw DomainError("ridge path needs at least one alpha");
    for (double alpha : alphas) {
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("ridge alpha must be >= 0");
    }
    require_finite(x.values(), "ridge design matrix");
    require_finite(y, "ridge targets");
    require_finite(sample_weights, "ridge sample weights");

    double weight_sum = 0.0;
    for (double w : sample_weights) {
        if (w < 0.0) throw DomainError("ridge sample weights must be non-negative");
        weight_sum += w;
    }
    if (!(weight_sum > 0.0)) throw DomainError("ridge fit needs at least one positive weight");

    Vec x_mean(p, 0.0);
    double y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = sample_weights[i];
        if (w == 0.0) continue;
        const auto r = x.row(i);
        for (std::size_t j = 0; j < p; ++j) x_mean[j] += w * r[j];
        y_mean += w * y[i];
    }
    for (double& m : x_mean) m /= weight_sum;
    y_mean /= weight_sum;

    std::vector<double> gram(p * p, 0.0);
    Vec rhs(p, 0.0);
    Vec centered(p);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = sample_weights[i];
        if (w == 0.0) continue;
        const auto r = x.row(i);
        for (std::size_t j = 0; j < p; ++j) centered[j] = r[j] - x_mean[j];
        const double yc = y[i] - y_mean;
        for (std::size_t j = 0; j < p; ++j) {
            const double wc = w * centered[j];
            if (wc == 0.0) continue;
            rhs[j] += wc * yc;
            double* g = gram.data() + j * p;
            for (std::size_t k = 0; k <= j; ++k) g[k] += wc * centered[k];
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < j; ++k) gram[k * p + j] = gram[j * p + k];
    }

    std::vector<RidgeFit> fits;
    fits.reserve(alphas.size());
    for (double alpha : alphas) {
        std::vector<double> penalised = gram;
        for (std::size_t j = 0; j < p; ++j) penalised[j * p + j] += alpha;
        Vec beta = rhs;
        if (alpha == 0.0) {
            if (!cholesky_solve(penalised, p, beta, 1e-12)) {
                throw RankDeficiencyError("singular normal equations with alpha = 0; use alpha > 0");
            }
        } else if (!cholesky_solve(penalised, p, beta)) {
            for (std::size_t j = 0; j < p; ++j) penalised[j * p + j] += 1e-10;
            beta = rhs;
            if (!cholesky_solve(std::move(penalised), p, beta)) {
                throw RankDeficiencyError("ridge normal equations failed to factorise");
            }
        }
        RidgeFit fit;
        fit.intercept = y_mean - dot(beta, x_mean);
        fit.coefficients = std::move(beta);
        fit.alpha = alpha;
        fits.push_back(std::move(fit));
    }
    return fits;
}

FeatureStats compute_feature_stats(const Matrix& x) {
    if (x.rows() < 2 || x.cols() == 0) {
        throw DomainError("feature statistics need at least two rows and one column");
    }
    require_finite(x.values(), "feature statistics input");
    const double n = static_cast<double>(x.rows());
    FeatureStats stats(x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        auto& s = stats[j];
        s.min = s.max = x(0, j);
        double sum = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const double v = x(i, j);
            s.min = std::min(s.min, v);
            s.max = std::max(s.max, v);
            sum += v;
        }
        // Rounding in the sum can push a constant column's mean one ulp outside [min, max].
        s.mean = std::clamp(sum / n, s.min, s.max);
        double sq = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const double d = x(i, j) - s.mean;
            sq += d * d;
        }
        s.std = std::sqrt(sq / n);
    }
    return stats;
}

}  // namespace lionets
