#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lionets/numerics.hpp"

namespace lionets {

enum class Activation { relu, tanh, sigmoid, linear, softmax };
enum class Task { binary_classification, regression, reconstruction };
enum class Loss { mae, mse, binary_cross_entropy, categorical_cross_entropy };

std::string_view to_string(Activation a);
std::string_view to_string(Task t);
std::string_view to_string(Loss l);
Activation parse_activation(std::string_view name);
Task parse_task(std::string_view name);
Loss parse_loss(std::string_view name);

struct DenseLayer {
    Matrix weights;  // out x in
    Vec bias;        // out
    Activation activation = Activation::linear;

    std::size_t in_dim() const noexcept { return weights.cols(); }
    std::size_t out_dim() const noexcept { return weights.rows(); }
};

struct MLPModel {
    std::size_t input_dim = 0;
    Task task = Task::regression;
    std::vector<DenseLayer> layers;

    std::size_t output_dim() const;
    /// Width of the penultimate layer; throws StructureError for single-layer models.
    std::size_t latent_dim() const;

    /// Checks the dimension chain, bias lengths and softmax placement.
    void validate() const;
};

struct LayerSpec {
    std::size_t width;
    Activation activation;
};

/// Glorot-uniform initialised network; biases start at zero.
MLPModel make_mlp(std::size_t input_dim, std::span<const LayerSpec> layers, Task task,
                  std::uint64_t seed);

/// Decoder mirroring the predictor: takes the penultimate width as input, walks the
/// predictor's hidden widths in reverse and ends at the predictor's input width.
/// The output layer is sigmoid for data in [0, 1] and linear otherwise.
MLPModel make_decoder(const MLPModel& predictor, bool unit_interval_output, std::uint64_t seed);

struct ForwardPass {
    Vec output;
    std::vector<Vec> activations;  // post-activation output of every layer
};

ForwardPass forward(const MLPModel& model, std::span<const double> x);

/// Output only, without keeping intermediate activations.
Vec predict(const MLPModel& model, std::span<const double> x);
Matrix predict_rows(const MLPModel& model, const Matrix& x);

/// Post-activation values of the penultimate layer.
Vec encode(const MLPModel& model, std::span<const double> x);
Matrix encode_rows(const MLPModel& model, const Matrix& x);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct TrainConfig {
    Loss loss = Loss::mse;
    AdamConfig adam;
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

/// Mean loss of one prediction against its target, as minimised by `train`.
double sample_loss(Loss loss, std::span<const double> output, std::span<const double> target);

/// Mini-batch Adam training; returns the mean training loss of every epoch.
std::vector<double> train(MLPModel& model, const Matrix& x, const Matrix& y,
                          const TrainConfig& cfg);

/// d output[output_index] / d x by backpropagation.
Vec gradient_wrt_input(const MLPModel& model, std::span<const double> x,
                       std::size_t output_index);

nlohmann::json model_to_json(const MLPModel& model);
MLPModel model_from_json(const nlohmann::json& doc);

void save_model(const MLPModel& model, const std::filesystem::path& path);
MLPModel load_model(const std::filesystem::path& path);
/// Parses a model document held in memory; ParseError carries the failing byte offset.
MLPModel parse_model(std::string_view text);

}  // namespace lionets
