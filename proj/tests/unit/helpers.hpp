#pragma once

#include <cmath>
#include <random>

#include "lionets/neural.hpp"
#include "lionets/numerics.hpp"

namespace testutil {

using lionets::Activation;
using lionets::DenseLayer;
using lionets::Matrix;
using lionets::MLPModel;
using lionets::Vec;

inline DenseLayer layer(Matrix w, Vec b, Activation a) {
    DenseLayer l;
    l.weights = std::move(w);
    l.bias = std::move(b);
    l.activation = a;
    return l;
}

inline Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

/// Identity first layer followed by w.x + b with the given output activation.
inline MLPModel linear_head(const Vec& w, double b, Activation out) {
    MLPModel m;
    m.input_dim = w.size();
    m.task = out == Activation::sigmoid ? lionets::Task::binary_classification
                                        : lionets::Task::regression;
    m.layers.push_back(layer(identity(w.size()), Vec(w.size(), 0.0), Activation::linear));
    m.layers.push_back(layer(Matrix(1, w.size(), w), Vec{b}, out));
    return m;
}

inline MLPModel identity_decoder(std::size_t n) {
    MLPModel m;
    m.input_dim = n;
    m.task = lionets::Task::reconstruction;
    m.layers.push_back(layer(identity(n), Vec(n, 0.0), Activation::linear));
    return m;
}

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace testutil
