#include "lionets/neural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "lionets/errors.hpp"

namespace lionets {

namespace {

constexpr double kProbabilityFloor = 1e-12;

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view name, const std::pair<std::string_view, Enum> (&table)[N],
                const char* what) {
    for (const auto& [key, value] : table) {
        if (key == name) return value;
    }
    throw DomainError(std::string("unknown ") + what + " '" + std::string(name) + "'");
}

constexpr std::pair<std::string_view, Activation> kActivations[] = {
    {"relu", Activation::relu},       {"tanh", Activation::tanh},
    {"sigmoid", Activation::sigmoid}, {"linear", Activation::linear},
    {"softmax", Activation::softmax},
};
constexpr std::pair<std::string_view, Task> kTasks[] = {
    {"binary_classification", Task::binary_classification},
    {"regression", Task::regression},
    {"reconstruction", Task::reconstruction},
};
constexpr std::pair<std::string_view, Loss> kLosses[] = {
    {"mae", Loss::mae},
    {"mse", Loss::mse},
    {"binary_cross_entropy", Loss::binary_cross_entropy},
    {"categorical_cross_entropy", Loss::categorical_cross_entropy},
};

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void affine(const DenseLayer& layer, std::span<const double> in, Vec& z) {
    const std::size_t out = layer.out_dim();
    const std::size_t n_in = layer.in_dim();
    z.resize(out);
    const double* w = layer.weights.values().data();
    for (std::size_t o = 0; o < out; ++o) {
        double s = layer.bias[o];
        const double* wr = w + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) s += wr[i] * in[i];
        z[o] = s;
    }
}

void activate(Activation act, const Vec& z, Vec& a) {
    a.resize(z.size());
    switch (act) {
        case Activation::relu:
            for (std::size_t i = 0; i < z.size(); ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
            break;
        case Activation::tanh:
            for (std::size_t i = 0; i < z.size(); ++i) a[i] = std::tanh(z[i]);
            break;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < z.size(); ++i) a[i] = sigmoid(z[i]);
            break;
        case Activation::linear:
            a = z;
            break;
        case Activation::softmax: {
            const double m = *std::max_element(z.begin(), z.end());
            double s = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) s += (a[i] = std::exp(z[i] - m));
            for (double& v : a) v /= s;
            break;
        }
    }
}

// Converts dL/da into dL/dz for one layer, given its pre- and post-activation values.
void activation_backward(Activation act, const Vec& z, const Vec& a, const Vec& da, Vec& dz) {
    dz.resize(z.size());
    switch (act) {
        case Activation::relu:
            for (std::size_t i = 0; i < z.size(); ++i) dz[i] = z[i] > 0.0 ? da[i] : 0.0;
            break;
        case Activation::tanh:
            for (std::size_t i = 0; i < z.size(); ++i) dz[i] = da[i] * (1.0 - a[i] * a[i]);
            break;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < z.size(); ++i) dz[i] = da[i] * a[i] * (1.0 - a[i]);
            break;
        case Activation::linear:
            dz = da;
            break;
        case Activation::softmax: {
            double s = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) s += a[i] * da[i];
            for (std::size_t i = 0; i < z.size(); ++i) dz[i] = a[i] * (da[i] - s);
            break;
        }
    }
}

void backprop_input(const DenseLayer& layer, const Vec& dz, Vec& din) {
    const std::size_t n_in = layer.in_dim();
    din.assign(n_in, 0.0);
    const double* w = layer.weights.values().data();
    for (std::size_t o = 0; o < layer.out_dim(); ++o) {
        const double g = dz[o];
        if (g == 0.0) continue;
        const double* wr = w + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) din[i] += g * wr[i];
    }
}

struct Trace {
    std::vector<Vec> pre;
    std::vector<Vec> post;
};

void forward_trace(const MLPModel& model, std::span<const double> x, Trace& t) {
    t.pre.resize(model.layers.size());
    t.post.resize(model.layers.size());
    std::span<const double> in = x;
    for (std::size_t k = 0; k < model.layers.size(); ++k) {
        affine(model.layers[k], in, t.pre[k]);
        activate(model.layers[k].activation, t.pre[k], t.post[k]);
        in = t.post[k];
    }
}

void require_input(const MLPModel& model, std::span<const double> x) {
    if (x.size() != model.input_dim) {
        throw DimensionError("model expects input of length " + std::to_string(model.input_dim) +
                             ", got " + std::to_string(x.size()));
    }
}

}  // namespace

std::string_view to_string(Activation a) {
    for (const auto& [k, v] : kActivations) if (v == a) return k;
    return "?";
}
std::string_view to_string(Task t) {
    for (const auto& [k, v] : kTasks) if (v == t) return k;
    return "?";
}
std::string_view to_string(Loss l) {
    for (const auto& [k, v] : kLosses) if (v == l) return k;
    return "?";
}
Activation parse_activation(std::string_view name) { return parse_enum(name, kActivations, "activation"); }
Task parse_task(std::string_view name) { return parse_enum(name, kTasks, "task"); }
Loss parse_loss(std::string_view name) { return parse_enum(name, kLosses, "loss"); }

std::size_t MLPModel::output_dim() const {
    if (layers.empty()) throw StructureError("model has no layers");
    return layers.back().out_dim();
}

std::size_t MLPModel::latent_dim() const {
    if (layers.size() < 2) throw StructureError("model needs at least two layers to expose a latent space");
    return layers[layers.size() - 2].out_dim();
}

void MLPModel::validate() const {
    if (input_dim == 0) throw ValidationError("model input_dim must be positive");
    if (layers.empty()) throw ValidationError("model has no layers");
    std::size_t width = input_dim;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& l = layers[k];
        const std::string at = "layer " + std::to_string(k);
        if (l.in_dim() != width) {
            throw ValidationError(at + " expects " + std::to_string(l.in_dim()) +
                                  " inputs but previous width is " + std::to_string(width));
        }
        if (l.out_dim() == 0) throw ValidationError(at + " has zero outputs");
        if (l.bias.size() != l.out_dim()) {
            throw ValidationError(at + " bias length " + std::to_string(l.bias.size()) +
                                  " != " + std::to_string(l.out_dim()) + " rows");
        }
        if (l.activation == Activation::softmax && k + 1 != layers.size()) {
            throw ValidationError(at + ": softmax is only allowed on the final layer");
        }
        require_finite(l.weights.values(), "layer weights");
        require_finite(l.bias, "layer bias");
        width = l.out_dim();
    }
}

MLPModel make_mlp(std::size_t input_dim, std::span<const LayerSpec> specs, Task task,
                  std::uint64_t seed) {
    MLPModel model;
    model.input_dim = input_dim;
    model.task = task;
    std::mt19937_64 rng(seed);
    std::size_t fan_in = input_dim;
    for (const auto& spec : specs) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + spec.width));
        std::uniform_real_distribution<double> init(-limit, limit);
        DenseLayer layer;
        layer.weights = Matrix(spec.width, fan_in);
        for (double& w : layer.weights.values()) w = init(rng);
        layer.bias.assign(spec.width, 0.0);
        layer.activation = spec.activation;
        model.layers.push_back(std::move(layer));
        fan_in = spec.width;
    }
    model.validate();
    return model;
}

MLPModel make_decoder(const MLPModel& predictor, bool unit_interval_output, std::uint64_t seed) {
    const std::size_t latent = predictor.latent_dim();
    std::vector<LayerSpec> specs;
    // Hidden layers before the penultimate one, walked backwards.
    for (std::size_t k = predictor.layers.size() - 2; k-- > 0;) {
        auto act = predictor.layers[k].activation;
        if (act == Activation::softmax) act = Activation::linear;
        specs.push_back({predictor.layers[k].out_dim(), act});
    }
    specs.push_back({predictor.input_dim,
                     unit_interval_output ? Activation::sigmoid : Activation::linear});
    return make_mlp(latent, specs, Task::reconstruction, seed);
}

ForwardPass forward(const MLPModel& model, std::span<const double> x) {
    require_input(model, x);
    Trace t;
    forward_trace(model, x, t);
    ForwardPass pass;
    pass.activations = std::move(t.post);
    pass.output = pass.activations.back();
    return pass;
}

Vec predict(const MLPModel& model, std::span<const double> x) {
    require_input(model, x);
    Vec in(x.begin(), x.end()), z, a;
    for (const auto& layer : model.layers) {
        affine(layer, in, z);
        activate(layer.activation, z, a);
        std::swap(in, a);
    }
    return in;
}

Matrix predict_rows(const MLPModel& model, const Matrix& x) {
    Matrix out(x.rows(), model.output_dim());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const Vec y = predict(model, x.row(i));
        std::copy(y.begin(), y.end(), out.row(i).begin());
    }
    return out;
}

Vec encode(const MLPModel& model, std::span<const double> x) {
    const std::size_t penultimate = model.layers.size() < 2 ? 0 : model.layers.size() - 2;
    if (model.layers.size() < 2) throw StructureError("encode needs a model with at least two layers");
    require_input(model, x);
    Vec in(x.begin(), x.end()), z, a;
    for (std::size_t k = 0; k <= penultimate; ++k) {
        affine(model.layers[k], in, z);
        activate(model.layers[k].activation, z, a);
        std::swap(in, a);
    }
    return in;
}

Matrix encode_rows(const MLPModel& model, const Matrix& x) {
    Matrix out(x.rows(), model.latent_dim());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const Vec h = encode(model, x.row(i));
        std::copy(h.begin(), h.end(), out.row(i).begin());
    }
    return out;
}

double sample_loss(Loss loss, std::span<const double> output, std::span<const double> target) {
    if (output.size() != target.size()) throw DimensionError("loss: output/target length mismatch");
    const double k = static_cast<double>(output.size());
    double s = 0.0;
    switch (loss) {
        case Loss::mae:
            for (std::size_t i = 0; i < output.size(); ++i) s += std::abs(output[i] - target[i]);
            return s / k;
        case Loss::mse:
            for (std::size_t i = 0; i < output.size(); ++i) {
                const double d = output[i] - target[i];
                s += d * d;
            }
            return s / k;
        case Loss::binary_cross_entropy:
            for (std::size_t i = 0; i < output.size(); ++i) {
                const double p = std::clamp(output[i], kProbabilityFloor, 1.0 - kProbabilityFloor);
                s -= target[i] * std::log(p) + (1.0 - target[i]) * std::log(1.0 - p);
            }
            return s / k;
        case Loss::categorical_cross_entropy:
            for (std::size_t i = 0; i < output.size(); ++i) {
                s -= target[i] * std::log(std::max(output[i], kProbabilityFloor));
            }
            return s;
    }
    return s;
}

std::vector<double> train(MLPModel& model, const Matrix& x, const Matrix& y,
                          const TrainConfig& cfg) {
    model.validate();
    const std::size_t n = x.rows();
    if (cfg.epochs < 1) throw DomainError("training needs at least one epoch");
    if (n == 0) throw DimensionError("training set is empty");
    if (cfg.batch_size < 1 || cfg.batch_size > n) {
        throw DomainError("batch size must lie in [1, " + std::to_string(n) + "]");
    }
    if (!(cfg.adam.learning_rate > 0.0)) throw DomainError("learning rate must be positive");
    if (x.cols() != model.input_dim || y.rows() != n || y.cols() != model.output_dim()) {
        throw DimensionError("training data shape does not match the model");
    }
    const Activation final_act = model.layers.back().activation;
    if (cfg.loss == Loss::binary_cross_entropy && final_act != Activation::sigmoid) {
        throw ValidationError("binary cross-entropy requires a sigmoid output layer");
    }
    if (cfg.loss == Loss::categorical_cross_entropy && final_act != Activation::softmax) {
        throw ValidationError("categorical cross-entropy requires a softmax output layer");
    }

    const std::size_t depth = model.layers.size();
    std::vector<std::vector<double>> grad_w(depth), grad_b(depth);
    std::vector<std::vector<double>> m_w(depth), v_w(depth), m_b(depth), v_b(depth);
    for (std::size_t k = 0; k < depth; ++k) {
        const auto& l = model.layers[k];
        grad_w[k].assign(l.weights.values().size(), 0.0);
        grad_b[k].assign(l.bias.size(), 0.0);
        m_w[k] = v_w[k] = grad_w[k];
        m_b[k] = v_b[k] = grad_b[k];
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> history;
    history.reserve(cfg.epochs);
    Trace trace;
    Vec da, dz, din;
    std::size_t step = 0;
    const double out_k = static_cast<double>(model.output_dim());

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t end = std::min(n, start + cfg.batch_size);
            const double batch = static_cast<double>(end - start);
            for (auto& g : grad_w) std::fill(g.begin(), g.end(), 0.0);
            for (auto& g : grad_b) std::fill(g.begin(), g.end(), 0.0);

            for (std::size_t s = start; s < end; ++s) {
                const auto xi = x.row(order[s]);
                const auto yi = y.row(order[s]);
                forward_trace(model, xi, trace);
                const Vec& out = trace.post.back();
                epoch_loss += sample_loss(cfg.loss, out, yi);

                // dL/dz of the output layer, scaled for the batch mean.
                const std::size_t K = out.size();
                bool have_dz = false;
                da.assign(K, 0.0);
                switch (cfg.loss) {
                    case Loss::mae:
                        for (std::size_t i = 0; i < K; ++i) {
                            const double d = out[i] - yi[i];
                            da[i] = (d > 0.0 ? 1.0 : d < 0.0 ? -1.0 : 0.0) / out_k;
                        }
                        break;
                    case Loss::mse:
                        for (std::size_t i = 0; i < K; ++i) da[i] = 2.0 * (out[i] - yi[i]) / out_k;
                        break;
                    case Loss::binary_cross_entropy:
                        dz.resize(K);
                        for (std::size_t i = 0; i < K; ++i) dz[i] = (out[i] - yi[i]) / out_k;
                        have_dz = true;
                        break;
                    case Loss::categorical_cross_entropy: {
                        const double total = std::accumulate(yi.begin(), yi.end(), 0.0);
                        dz.resize(K);
                        for (std::size_t i = 0; i < K; ++i) dz[i] = out[i] * total - yi[i];
                        have_dz = true;
                        break;
                    }
                }
                if (!have_dz) {
                    activation_backward(final_act, trace.pre.back(), out, da, dz);
                }
                for (double& g : dz) g /= batch;

                for (std::size_t k = depth; k-- > 0;) {
                    const auto& layer = model.layers[k];
                    const std::span<const double> in =
                        k == 0 ? xi : std::span<const double>(trace.post[k - 1]);
                    const std::size_t n_in = layer.in_dim();
                    double* gw = grad_w[k].data();
                    for (std::size_t o = 0; o < layer.out_dim(); ++o) {
                        const double g = dz[o];
                        grad_b[k][o] += g;
                        if (g == 0.0) continue;
                        double* row = gw + o * n_in;
                        for (std::size_t i = 0; i < n_in; ++i) row[i] += g * in[i];
                    }
                    if (k == 0) break;
                    backprop_input(layer, dz, din);
                    activation_backward(model.layers[k - 1].activation, trace.pre[k - 1],
                                        trace.post[k - 1], din, dz);
                }
            }

            ++step;
            const auto& a = cfg.adam;
            const double c1 = 1.0 - std::pow(a.beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(a.beta2, static_cast<double>(step));
            auto update = [&](std::vector<double>& param, const std::vector<double>& g,
                              std::vector<double>& m, std::vector<double>& v) {
                for (std::size_t i = 0; i < param.size(); ++i) {
                    m[i] = a.beta1 * m[i] + (1.0 - a.beta1) * g[i];
                    v[i] = a.beta2 * v[i] + (1.0 - a.beta2) * g[i] * g[i];
                    param[i] -= a.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + a.epsilon);
                }
            };
            for (std::size_t k = 0; k < depth; ++k) {
                update(model.layers[k].weights.values(), grad_w[k], m_w[k], v_w[k]);
                update(model.layers[k].bias, grad_b[k], m_b[k], v_b[k]);
            }
        }
        epoch_loss /= static_cast<double>(n);
        if (!std::isfinite(epoch_loss)) {
            throw TrainingDivergedError(epoch, "training diverged at epoch " + std::to_string(epoch));
        }
        history.push_back(epoch_loss);
    }
    return history;
}

Vec gradient_wrt_input(const MLPModel& model, std::span<const double> x,
                       std::size_t output_index) {
    require_input(model, x);
    if (output_index >= model.output_dim()) {
        throw DimensionError("output index " + std::to_string(output_index) +
                             " out of range for output width " +
                             std::to_string(model.output_dim()));
    }
    Trace t;
    forward_trace(model, x, t);
    Vec da(model.output_dim(), 0.0), dz;
    da[output_index] = 1.0;
    for (std::size_t k = model.layers.size(); k-- > 0;) {
        activation_backward(model.layers[k].activation, t.pre[k], t.post[k], da, dz);
        backprop_input(model.layers[k], dz, da);
    }
    return da;
}

nlohmann::json model_to_json(const MLPModel& model) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : model.layers) {
        layers.push_back({{"rows", l.weights.rows()},
                          {"cols", l.weights.cols()},
                          {"weights", l.weights.values()},
                          {"bias", l.bias},
                          {"activation", to_string(l.activation)}});
    }
    return {{"input_dim", model.input_dim}, {"task", to_string(model.task)}, {"layers", layers}};
}

MLPModel model_from_json(const nlohmann::json& doc) {
    MLPModel model;
    try {
        model.input_dim = doc.at("input_dim").get<std::size_t>();
        model.task = parse_task(doc.at("task").get<std::string>());
        for (const auto& l : doc.at("layers")) {
            const auto rows = l.at("rows").get<std::size_t>();
            const auto cols = l.at("cols").get<std::size_t>();
            DenseLayer layer;
            layer.weights = Matrix(rows, cols, l.at("weights").get<std::vector<double>>());
            layer.bias = l.at("bias").get<Vec>();
            layer.activation = parse_activation(l.at("activation").get<std::string>());
            model.layers.push_back(std::move(layer));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("model document: ") + e.what());
    } catch (const DimensionError& e) {
        throw ValidationError(std::string("model document: ") + e.what());
    } catch (const DomainError& e) {
        throw ValidationError(std::string("model document: ") + e.what());
    }
    model.validate();
    return model;
}

MLPModel parse_model(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.byte, std::string("malformed model file: ") + e.what());
    }
    return model_from_json(doc);
}

void save_model(const MLPModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write model file " + path.string());
    out << model_to_json(model).dump() << '\n';
}

MLPModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read model file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

}  // namespace lionets
