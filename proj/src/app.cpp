#include "lionets/app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lionets/baselines.hpp"
#include "lionets/csv.hpp"
#include "lionets/errors.hpp"
#include "lionets/explanation_io.hpp"
#include "lionets/lionets.hpp"
#include "lionets/synthetic.hpp"
#include "lionets/timeseries.hpp"

namespace lionets::app {

using nlohmann::json;

DataKind parse_data_kind(std::string_view name) {
    if (name == "toy") return DataKind::toy;
    if (name == "text") return DataKind::text;
    if (name == "timeseries") return DataKind::timeseries;
    throw ValidationError("unknown data kind '" + std::string(name) + "'");
}

std::string_view to_string(DataKind kind) {
    switch (kind) {
        case DataKind::toy: return "toy";
        case DataKind::text: return "text";
        case DataKind::timeseries: return "timeseries";
    }
    return "toy";
}

ExplainerKind parse_explainer(std::string_view name) {
    if (name == "lionets") return ExplainerKind::lionets;
    if (name == "lime") return ExplainerKind::lime;
    if (name == "gxi") return ExplainerKind::gxi;
    throw ValidationError("unknown explainer '" + std::string(name) + "'");
}

std::string_view to_string(ExplainerKind kind) {
    switch (kind) {
        case ExplainerKind::lionets: return "lionets";
        case ExplainerKind::lime: return "lime";
        case ExplainerKind::gxi: return "gxi";
    }
    return "lionets";
}

json Manifest::to_json() const {
    json j;
    j["kind"] = app::to_string(kind);
    j["seed"] = seed;
    j["splits"] = {{"train", train_file}, {"val", val_file}};
    j["task"] = lionets::to_string(task);
    j["features"] = features;
    if (kind == DataKind::timeseries) {
        j["window"] = window;
        j["sensors"] = sensors;
        if (task == Task::regression) {
            j["rul_scale"] = rul_scale;
        } else {
            j["threshold"] = threshold;
        }
    }
    if (max_features) j["max_features"] = *max_features;
    return j;
}

Manifest Manifest::from_json(const json& doc) {
    try {
        Manifest m;
        m.kind = parse_data_kind(doc.at("kind").get<std::string>());
        m.seed = doc.at("seed").get<std::uint64_t>();
        m.train_file = doc.at("splits").at("train").get<std::string>();
        m.val_file = doc.at("splits").at("val").get<std::string>();
        m.task = parse_task(doc.at("task").get<std::string>());
        m.features = doc.at("features").get<std::size_t>();
        if (m.kind == DataKind::timeseries) {
            m.window = doc.at("window").get<std::size_t>();
            m.sensors = doc.at("sensors").get<std::size_t>();
            if (m.task == Task::regression) {
                m.rul_scale = doc.at("rul_scale").get<double>();
                if (!(m.rul_scale > 0.0)) throw ValidationError("rul_scale must be positive");
            } else {
                m.threshold = doc.at("threshold").get<double>();
            }
            if (m.window * m.sensors != m.features) {
                throw ValidationError("manifest window x sensors does not match features");
            }
        }
        if (doc.contains("max_features")) m.max_features = doc.at("max_features").get<std::size_t>();
        if (m.task == Task::reconstruction) throw ValidationError("manifest task cannot be reconstruction");
        return m;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid manifest: ") + e.what());
    }
}

fs::path manifest_path(const fs::path& ws) { return ws / "manifest.json"; }
fs::path predictor_path(const fs::path& ws) { return ws / "predictor.json"; }
fs::path decoder_path(const fs::path& ws) { return ws / "decoder.json"; }
fs::path stats_path(const fs::path& ws) { return ws / "stats.json"; }
fs::path vocabulary_path(const fs::path& ws) { return ws / "vocabulary.json"; }

namespace {

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << content;
}

json read_json(const fs::path& path, const std::string& what) {
    if (!fs::exists(path)) throw ValidationError(what + " not found: " + path.string());
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.byte, what + " is not valid JSON: " + path.string());
    }
}

void require_file(const fs::path& path, const std::string& what) {
    if (!fs::exists(path)) throw ValidationError(what + " not found: " + path.string());
}

std::size_t val_count(std::size_t n, double ratio) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("val ratio must be in (0, 1)");
    const auto v = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratio));
    return std::clamp<std::size_t>(v, 1, n - 1);
}

void write_toy(const fs::path& path, const data::DenseDataset& d, std::size_t begin, std::size_t end) {
    std::ofstream out(path, std::ios::binary);
    data::CsvRow header{"label"};
    for (std::size_t j = 0; j < d.features.cols(); ++j) header.push_back("f" + std::to_string(j));
    data::write_csv_row(out, header);
    for (std::size_t i = begin; i < end; ++i) {
        data::CsvRow row{d.labels[i] > 0 ? "1" : "0"};
        for (double v : d.features.row(i)) row.push_back(data::format_double(v));
        data::write_csv_row(out, row);
    }
}

void write_texts(const fs::path& path, const std::vector<data::LabelledText>& corpus,
                 std::size_t begin, std::size_t end) {
    std::ofstream out(path, std::ios::binary);
    data::write_csv_row(out, {"label", "text"});
    for (std::size_t i = begin; i < end; ++i) {
        data::write_csv_row(out, {std::to_string(corpus[i].label), corpus[i].text});
    }
}

void write_series(const fs::path& path, const std::vector<data::UnitSeries>& units,
                  std::size_t begin, std::size_t end, std::size_t sensors) {
    std::ofstream out(path, std::ios::binary);
    data::CsvRow header{"unit", "timestep"};
    for (std::size_t s = 0; s < sensors; ++s) header.push_back("sensor_" + std::to_string(s + 1));
    header.push_back("rul");
    data::write_csv_row(out, header);
    for (std::size_t u = begin; u < end; ++u) {
        const auto& unit = units[u];
        for (std::size_t t = 0; t < unit.timesteps.size(); ++t) {
            data::CsvRow row{std::to_string(unit.unit), std::to_string(unit.timesteps[t])};
            for (double v : unit.readings.row(t)) row.push_back(data::format_double(v));
            row.push_back(data::format_double(unit.rul[t]));
            data::write_csv_row(out, row);
        }
    }
}

std::vector<data::UnitSeries> read_series(const data::CsvTable& table, std::size_t sensors) {
    const std::size_t unit_col = table.column("unit"), t_col = table.column("timestep"),
                      rul_col = table.column("rul");
    std::vector<std::size_t> sensor_cols;
    for (std::size_t s = 0; s < sensors; ++s) sensor_cols.push_back(table.column("sensor_" + std::to_string(s + 1)));
    std::vector<data::UnitSeries> units;
    for (const auto& row : table.rows) {
        const int unit = static_cast<int>(data::parse_double(row[unit_col], "unit"));
        if (units.empty() || units.back().unit != unit) {
            for (const auto& u : units) {
                if (u.unit == unit) throw ValidationError("rows of unit " + std::to_string(unit) + " are not contiguous");
            }
            units.push_back({unit, {}, Matrix(0, sensors), {}});
        }
        auto& u = units.back();
        u.timesteps.push_back(static_cast<int>(data::parse_double(row[t_col], "timestep")));
        Vec readings;
        for (std::size_t c : sensor_cols) readings.push_back(data::parse_double(row[c], "sensor"));
        u.readings.append_row(readings);
        u.rul.push_back(data::parse_double(row[rul_col], "rul"));
    }
    return units;
}

double label_value(std::string_view text) {
    const double v = data::parse_double(text, "label");
    if (v != 0.0 && v != 1.0) throw ValidationError("labels must be 0 or 1");
    return v;
}

Split load_split(const fs::path& path, const std::string& name, const Manifest& m,
                 const data::Vocabulary* vocab) {
    require_file(path, name + " split");
    const data::CsvTable table = data::read_csv(path);
    Split s;
    s.name = name;
    switch (m.kind) {
        case DataKind::toy: {
            const std::size_t label_col = table.column("label");
            s.x = Matrix(table.rows.size(), m.features);
            for (std::size_t i = 0; i < table.rows.size(); ++i) {
                s.y.push_back(label_value(table.rows[i][label_col]));
                for (std::size_t j = 0; j < m.features; ++j) {
                    s.x(i, j) = data::parse_double(table.rows[i][table.column("f" + std::to_string(j))], "feature");
                }
            }
            break;
        }
        case DataKind::text: {
            const std::size_t label_col = table.column("label"), text_col = table.column("text");
            s.x = Matrix(0, vocab->size());
            for (const auto& row : table.rows) {
                s.y.push_back(label_value(row[label_col]));
                s.texts.push_back(row[text_col]);
                s.x.append_row(data::vectorize(*vocab, row[text_col]));
            }
            break;
        }
        case DataKind::timeseries: {
            const auto windows = data::make_windows(read_series(table, m.sensors), m.window);
            s.x = windows.windows;
            if (m.task == Task::regression) {
                for (double r : windows.labels) s.y.push_back(r / m.rul_scale);
            } else {
                s.y = data::binarize_rul(windows.labels, m.threshold);
            }
            break;
        }
    }
    if (s.x.rows() < 2) throw ValidationError(name + " split needs at least two instances");
    for (std::size_t i = 0; i < s.x.rows(); ++i) s.ids.push_back(name + "-" + std::to_string(i));
    return s;
}

Manifest read_manifest(const fs::path& ws) {
    const fs::path path = manifest_path(ws);
    if (!fs::exists(path)) {
        throw ValidationError("manifest not found: " + path.string() + " (run generate-data first)");
    }
    return Manifest::from_json(read_json(path, "manifest"));
}

struct TrainDefaults {
    std::size_t epochs;
    std::size_t batch_size;
    double learning_rate;
};

TrainDefaults predictor_defaults(DataKind kind) {
    switch (kind) {
        case DataKind::toy: return {12, 10, 0.003};
        case DataKind::text: return {12, 16, 0.001};
        case DataKind::timeseries: return {30, 32, 0.003};
    }
    return {100, 32, 1e-3};
}

TrainDefaults decoder_defaults(DataKind kind) {
    switch (kind) {
        case DataKind::toy: return {6000, 10, 0.01};
        case DataKind::text: return {150, 16, 0.005};
        case DataKind::timeseries: return {60, 32, 0.003};
    }
    return {100, 32, 1e-3};
}

TrainConfig make_train_config(const TrainOptions& opts, const TrainDefaults& d, Loss loss,
                              std::uint64_t seed) {
    TrainConfig cfg;
    cfg.loss = loss;
    cfg.epochs = opts.epochs.value_or(d.epochs);
    cfg.batch_size = opts.batch_size.value_or(d.batch_size);
    cfg.adam.learning_rate = opts.learning_rate.value_or(d.learning_rate);
    cfg.seed = opts.seed.value_or(seed);
    return cfg;
}

void print_losses(std::ostream& log, const std::vector<double>& losses) {
    for (std::size_t e = 0; e < losses.size(); ++e) {
        log << "epoch " << (e + 1) << " loss " << data::format_double(losses[e]) << '\n';
    }
}

void remove_if_present(const fs::path& path, std::ostream& log) {
    if (fs::remove(path)) log << "removed stale " << path.filename().string() << '\n';
}

}  // namespace

void save_feature_stats(const FeatureStats& stats, const fs::path& path) {
    json j = json::array();
    for (const auto& s : stats) j.push_back({{"min", s.min}, {"max", s.max}, {"mean", s.mean}, {"std", s.std}});
    write_text(path, j.dump(2) + "\n");
}

FeatureStats load_feature_stats(const fs::path& path) {
    const json j = read_json(path, "feature stats");
    FeatureStats stats;
    try {
        for (const auto& e : j) {
            FeatureStat s{e.at("min").get<double>(), e.at("max").get<double>(),
                          e.at("mean").get<double>(), e.at("std").get<double>()};
            if (!(s.min <= s.max) || !(s.std >= 0.0) || s.mean < s.min || s.mean > s.max) {
                throw ValidationError("inconsistent feature stats entry in " + path.string());
            }
            stats.push_back(s);
        }
    } catch (const json::exception& e) {
        throw ValidationError("invalid feature stats file: " + std::string(e.what()));
    }
    return stats;
}

void generate_data(const fs::path& ws, const GenerateOptions& opts, std::ostream& log) {
    fs::create_directories(ws);
    Manifest m;
    m.kind = opts.kind;
    m.seed = opts.seed;
    switch (opts.kind) {
        case DataKind::toy: {
            const std::size_t n = opts.samples.value_or(100);
            const auto d = data::synth_classification(n, opts.features, opts.seed);
            const std::size_t n_val = val_count(n, opts.val_ratio);
            write_toy(ws / m.train_file, d, 0, n - n_val);
            write_toy(ws / m.val_file, d, n - n_val, n);
            m.features = opts.features;
            log << "toy data: " << (n - n_val) << " train, " << n_val << " val rows, "
                << opts.features << " features\n";
            break;
        }
        case DataKind::text: {
            const std::size_t n = opts.samples.value_or(200);
            const auto corpus = data::synth_text_corpus(n, opts.seed);
            const std::size_t n_val = val_count(n, opts.val_ratio);
            write_texts(ws / m.train_file, corpus, 0, n - n_val);
            write_texts(ws / m.val_file, corpus, n - n_val, n);
            std::vector<std::string> docs;
            for (std::size_t i = 0; i + n_val < n; ++i) docs.push_back(data::preprocess_text(corpus[i].text));
            const auto vocab = data::tfidf_fit(docs, opts.max_features);
            write_text(vocabulary_path(ws), vocab.to_json().dump(2) + "\n");
            m.features = vocab.size();
            m.max_features = opts.max_features;
            log << "text data: " << (n - n_val) << " train, " << n_val << " val sentences, vocabulary "
                << vocab.size() << '\n';
            break;
        }
        case DataKind::timeseries: {
            const std::size_t n = opts.samples.value_or(12);
            if (n < 2) throw ValidationError("timeseries data needs at least two units");
            const auto units = data::synth_degradation(n, opts.sensors, opts.seed);
            const std::size_t n_val = val_count(n, opts.val_ratio);
            write_series(ws / m.train_file, units, 0, n - n_val, opts.sensors);
            write_series(ws / m.val_file, units, n - n_val, n, opts.sensors);
            m.window = opts.window;
            m.sensors = opts.sensors;
            m.features = opts.window * opts.sensors;
            if (opts.regression) {
                m.task = Task::regression;
                double top = 0.0;
                for (std::size_t u = 0; u + n_val < n; ++u) {
                    for (double r : units[u].rul) top = std::max(top, r);
                }
                m.rul_scale = top;
            } else {
                if (!(opts.threshold > 0.0)) throw ValidationError("threshold must be positive");
                m.threshold = opts.threshold;
            }
            log << "timeseries data: " << (n - n_val) << " train, " << n_val << " val units, "
                << opts.sensors << " sensors, window " << opts.window << '\n';
            break;
        }
    }
    write_text(manifest_path(ws), m.to_json().dump(2) + "\n");
    for (const auto& stale : {predictor_path(ws), decoder_path(ws), stats_path(ws)}) {
        remove_if_present(stale, log);
    }
}

std::vector<LayerSpec> predictor_architecture(DataKind kind, Task task) {
    const Activation out = task == Task::regression ? Activation::linear : Activation::sigmoid;
    switch (kind) {
        case DataKind::toy: return {{8, Activation::tanh}, {4, Activation::tanh}, {1, out}};
        case DataKind::text: return {{32, Activation::relu}, {16, Activation::tanh}, {1, out}};
        case DataKind::timeseries: return {{32, Activation::tanh}, {8, Activation::tanh}, {1, out}};
    }
    return {};
}

TrainConfig predictor_train_config(DataKind kind, Task task, const TrainOptions& opts,
                                   std::uint64_t manifest_seed) {
    return make_train_config(opts, predictor_defaults(kind),
                             task == Task::regression ? Loss::mse : Loss::binary_cross_entropy,
                             manifest_seed);
}

TrainConfig decoder_train_config(DataKind kind, const TrainOptions& opts, std::uint64_t manifest_seed) {
    Loss loss = Loss::mse;
    if (kind == DataKind::toy) loss = Loss::mae;
    if (kind == DataKind::text) loss = Loss::binary_cross_entropy;
    return make_train_config(opts, decoder_defaults(kind), loss, manifest_seed + 1);
}

void train_predictor(const fs::path& dir, const TrainOptions& opts, std::ostream& log) {
    const Workspace ws = Workspace::load(dir, Stage::data);
    const Manifest& m = ws.manifest();
    const auto arch = predictor_architecture(m.kind, m.task);
    const TrainConfig cfg = predictor_train_config(m.kind, m.task, opts, m.seed);
    MLPModel model = make_mlp(m.features, arch, m.task, cfg.seed);
    const Matrix y(ws.train().y.size(), 1, ws.train().y);
    print_losses(log, train(model, ws.train().x, y, cfg));

    for (const Split* split : {&ws.train(), &ws.val()}) {
        double score = 0.0;
        for (std::size_t i = 0; i < split->x.rows(); ++i) {
            const double p = predict(model, split->x.row(i))[0];
            score += m.task == Task::regression ? std::abs(p - split->y[i])
                                                : ((p >= 0.5) == (split->y[i] == 1.0) ? 1.0 : 0.0);
        }
        score /= static_cast<double>(split->x.rows());
        log << split->name << (m.task == Task::regression ? " mae " : " accuracy ")
            << data::format_double(score) << '\n';
    }
    save_model(model, predictor_path(dir));
    remove_if_present(decoder_path(dir), log);
    remove_if_present(stats_path(dir), log);
    log << "wrote " << predictor_path(dir).string() << '\n';
}

void train_decoder(const fs::path& dir, const TrainOptions& opts, std::ostream& log) {
    const Workspace ws = Workspace::load(dir, Stage::predictor);
    const Manifest& m = ws.manifest();
    const TrainConfig cfg = decoder_train_config(m.kind, opts, m.seed);
    MLPModel decoder = make_decoder(ws.predictor(), true, cfg.seed);
    const Matrix latent = encode_rows(ws.predictor(), ws.train().x);
    print_losses(log, train(decoder, latent, ws.train().x, cfg));

    double mae = 0.0;
    for (std::size_t i = 0; i < latent.rows(); ++i) {
        const Vec out = predict(decoder, latent.row(i));
        for (std::size_t j = 0; j < out.size(); ++j) mae += std::abs(out[j] - ws.train().x(i, j));
    }
    mae /= static_cast<double>(latent.rows() * ws.train().x.cols());
    log << "reconstruction mae " << data::format_double(mae) << '\n';
    save_model(decoder, decoder_path(dir));
    log << "wrote " << decoder_path(dir).string() << '\n';
}

void compute_stats(const fs::path& dir, std::ostream& log) {
    const Workspace ws = Workspace::load(dir, Stage::predictor);
    const FeatureStats stats = compute_feature_stats(encode_rows(ws.predictor(), ws.train().x));
    save_feature_stats(stats, stats_path(dir));
    log << "wrote " << stats.size() << " latent feature records to " << stats_path(dir).string() << '\n';
}

Workspace Workspace::load(const fs::path& dir, Stage required) {
    if (!fs::is_directory(dir)) throw ValidationError("workspace not found: " + dir.string());
    Workspace ws;
    ws.dir_ = dir;
    ws.manifest_ = read_manifest(dir);
    const Manifest& m = ws.manifest_;
    if (m.kind == DataKind::text) {
        ws.vocab_ = data::Vocabulary::from_json(read_json(vocabulary_path(dir), "vocabulary"));
        if (ws.vocab_->size() != m.features) throw ValidationError("vocabulary size does not match the manifest");
    }
    const data::Vocabulary* vocab = ws.vocab_ ? &*ws.vocab_ : nullptr;
    ws.train_ = load_split(dir / m.train_file, "train", m, vocab);
    ws.val_ = load_split(dir / m.val_file, "val", m, vocab);
    ws.input_stats_ = compute_feature_stats(ws.train_.x);

    switch (m.kind) {
        case DataKind::toy:
            for (std::size_t j = 0; j < m.features; ++j) ws.feature_names_.push_back("f" + std::to_string(j));
            break;
        case DataKind::text:
            ws.feature_names_ = ws.vocab_->tokens();
            break;
        case DataKind::timeseries:
            for (std::size_t t = 0; t < m.window; ++t) {
                for (std::size_t s = 0; s < m.sensors; ++s) {
                    ws.feature_names_.push_back("t" + std::to_string(t) + ":s" + std::to_string(s));
                }
            }
            break;
    }

    if (required >= Stage::predictor) {
        require_file(predictor_path(dir), "predictor model");
        ws.predictor_ = load_model(predictor_path(dir));
        if (ws.predictor_.input_dim != m.features || ws.predictor_.output_dim() != 1) {
            throw ValidationError("predictor model does not match the dataset");
        }
        ws.predictor_.latent_dim();
    }
    if (required >= Stage::decoder) {
        require_file(decoder_path(dir), "decoder model");
        ws.decoder_ = load_model(decoder_path(dir));
        if (ws.decoder_.input_dim != ws.predictor_.latent_dim() || ws.decoder_.output_dim() != m.features) {
            throw ValidationError("decoder model does not mirror the predictor");
        }
    }
    if (required >= Stage::stats) {
        ws.latent_stats_ = load_feature_stats(stats_path(dir));
        if (ws.latent_stats_.size() != ws.predictor_.latent_dim()) {
            throw ValidationError("feature stats do not match the predictor latent width");
        }
    }
    return ws;
}

const Split& Workspace::split(std::string_view name) const {
    if (name == "train") return train_;
    if (name == "val") return val_;
    throw ValidationError("unknown split '" + std::string(name) + "'");
}

const data::Vocabulary& Workspace::vocabulary() const {
    if (!vocab_) throw ValidationError("workspace has no vocabulary");
    return *vocab_;
}

Workspace::InstanceRef Workspace::find(std::string_view id) const {
    const auto dash = id.find('-');
    if (dash != std::string_view::npos) {
        const Split& s = split(id.substr(0, dash));
        const auto rest = id.substr(dash + 1);
        std::size_t index = 0;
        const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), index);
        if (res.ec == std::errc() && res.ptr == rest.data() + rest.size() && !rest.empty() &&
            index < s.x.rows()) {
            return {&s, index};
        }
    }
    throw ValidationError("unknown instance id '" + std::string(id) + "'");
}

double Workspace::predict(std::span<const double> x) const { return predicted_value(predictor_, x, 0); }

Explanation run_explainer(const Workspace& ws, std::span<const double> instance,
                          const ExplainSettings& settings) {
    if (instance.size() != ws.manifest().features) {
        throw DimensionError("instance has " + std::to_string(instance.size()) + " features, expected " +
                             std::to_string(ws.manifest().features));
    }
    switch (settings.explainer) {
        case ExplainerKind::lionets: {
            NeighbourhoodConfig cfg;
            cfg.size = settings.neighbours;
            cfg.seed = settings.seed;
            if (settings.fast) cfg.alpha_grid = NeighbourhoodConfig::fast_grid();
            return explain(ws.predictor(), ws.decoder(), ws.latent_stats(), instance, cfg).explanation;
        }
        case ExplainerKind::lime: {
            if (ws.manifest().kind == DataKind::toy) {
                throw ValidationError("lime requires sparse or flattened input; toy data is dense tabular");
            }
            baselines::LimeConfig cfg;
            cfg.num_samples = settings.lime_samples;
            cfg.seed = settings.seed;
            return baselines::lime_text_explain(ws.predictor(), instance, cfg).explanation;
        }
        case ExplainerKind::gxi: {
            Explanation e = baselines::gradient_x_input_explain(ws.predictor(), instance, 0);
            e.seed = settings.seed;
            return e;
        }
    }
    throw ValidationError("unknown explainer");
}

json explanation_json(const Workspace& ws, const std::string& instance_id,
                      std::span<const double> instance, const ExplainSettings& settings,
                      std::size_t top_k) {
    const Explanation e = run_explainer(ws, instance, settings);
    ExplanationDocument doc;
    doc.instance_id = instance_id;
    doc.explanation = &e;
    doc.instance = instance;
    doc.feature_names = ws.feature_names();
    doc.sparse = ws.sparse();
    if (ws.sparse()) doc.counterfactuals = counterfactual_features(e, instance, top_k);
    if (ws.manifest().kind == DataKind::timeseries) {
        doc.sensors = aggregate_sensor_importance(e.importances, ws.manifest().window, ws.manifest().sensors);
    }
    return explanation_to_json(doc);
}

ExplainOutputs explain_instance(const Workspace& ws, const std::string& instance_id,
                                const ExplainSettings& settings, const fs::path& out_dir,
                                std::size_t top_k) {
    const auto ref = ws.find(instance_id);
    const auto instance = ref.split->x.row(ref.index);
    const json doc = explanation_json(ws, instance_id, instance, settings, top_k);
    fs::create_directories(out_dir);
    const std::string stem = instance_id + "_" + std::string(to_string(settings.explainer));
    ExplainOutputs out;
    out.explanation = out_dir / (stem + ".json");
    write_text(out.explanation, doc.dump(2) + "\n");

    Vec importances(instance.size(), 0.0);
    for (const auto& item : doc.at("importances")) {
        importances[item.at("index").get<std::size_t>()] = item.at("importance").get<double>();
    }
    if (ws.sparse()) {
        for (const auto& item : doc.at("counterfactuals")) {
            importances[item.at("index").get<std::size_t>()] = item.at("importance").get<double>();
        }
    }
    out.bar_plot = out_dir / (stem + "_bars.csv");
    {
        std::ofstream bars(out.bar_plot, std::ios::binary);
        write_bar_plot_csv(bars, importances, ws.feature_names());
    }
    if (doc.contains("sensors")) {
        std::vector<SensorInfluence> sensors;
        for (const auto& s : doc.at("sensors")) {
            sensors.push_back({s.at("mean").get<double>(), s.at("std").get<double>(),
                               s.at("min").get<double>(), s.at("max").get<double>()});
        }
        out.sensors = out_dir / (stem + "_sensors.csv");
        std::ofstream csv(*out.sensors, std::ios::binary);
        write_sensor_csv(csv, sensors);
    }
    return out;
}

std::vector<std::size_t> evaluation_indices(std::size_t split_size, std::size_t count) {
    count = std::min(count, split_size);
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(k * split_size / count);
    return out;
}

EvaluateOutcome evaluate(const Workspace& ws, const EvaluateOptions& opts) {
    if (opts.explainers.empty()) throw ValidationError("evaluate needs at least one explainer");
    if (opts.instances == 0) throw ValidationError("evaluate needs at least one instance");
    const Manifest& m = ws.manifest();
    const metrics::PredictFn predictor = [&ws](std::span<const double> x) { return ws.predict(x); };

    metrics::AltruistGrouping grouping;
    Vec feature_std;
    for (const auto& s : ws.input_stats()) feature_std.push_back(s.std);
    switch (m.kind) {
        case DataKind::text:
            grouping.kind = metrics::AltruistGrouping::Kind::per_token;
            break;
        case DataKind::toy:
            grouping.kind = metrics::AltruistGrouping::Kind::per_feature;
            grouping.feature_std = feature_std;
            break;
        case DataKind::timeseries: {
            grouping.kind = metrics::AltruistGrouping::Kind::per_sensor;
            grouping.window = m.window;
            grouping.sensors = m.sensors;
            // Spread of each sensor's readings over the training windows.
            for (std::size_t s = 0; s < m.sensors; ++s) {
                double sum = 0.0, sq = 0.0;
                std::size_t n = 0;
                for (std::size_t i = 0; i < ws.train().x.rows(); ++i) {
                    for (std::size_t t = 0; t < m.window; ++t) {
                        const double v = ws.train().x(i, t * m.sensors + s);
                        sum += v;
                        sq += v * v;
                        ++n;
                    }
                }
                const double mean = sum / static_cast<double>(n);
                grouping.sensor_std.push_back(std::sqrt(std::max(0.0, sq / static_cast<double>(n) - mean * mean)));
            }
            break;
        }
    }

    EvaluateOutcome outcome;
    for (const auto& split_name : opts.splits) {
        const Split& split = ws.split(split_name);
        const auto indices = evaluation_indices(split.x.rows(), opts.instances);
        for (ExplainerKind kind : opts.explainers) {
            ExplainSettings settings = opts.settings;
            settings.explainer = kind;
            std::map<Vec, Explanation> memo;
            auto explain_cached = [&](std::span<const double> x) -> const Explanation& {
                Vec key(x.begin(), x.end());
                auto it = memo.find(key);
                if (it == memo.end()) it = memo.emplace(std::move(key), run_explainer(ws, x, settings)).first;
                return it->second;
            };
            const metrics::ExplainFn explainer = [&](std::span<const double> x) {
                return explain_cached(x).importances;
            };

            std::vector<Vec> instances;
            std::vector<Explanation> explanations;
            std::size_t failed = 0;
            std::string first_error;
            for (std::size_t idx : indices) {
                try {
                    explanations.push_back(explain_cached(split.x.row(idx)));
                    instances.emplace_back(split.x.row(idx).begin(), split.x.row(idx).end());
                } catch (const Error& e) {
                    if (first_error.empty()) first_error = e.what();
                    ++failed;
                }
            }
            const std::string label = std::string(to_string(kind)) + " on " + split_name;
            if (static_cast<double>(failed) > opts.max_failure_rate * static_cast<double>(indices.size()) ||
                explanations.empty()) {
                outcome.failures.push_back(label + ": " + std::to_string(failed) + "/" +
                                           std::to_string(indices.size()) +
                                           " instances failed (" + first_error + ")");
                continue;
            }

            metrics::MetricReport r;
            r.explainer = std::string(to_string(kind));
            r.split = split_name;
            r.instances = explanations.size();
            if (std::all_of(explanations.begin(), explanations.end(),
                            [](const Explanation& e) { return e.fidelity_mae.has_value(); })) {
                double mae = 0.0;
                for (const auto& e : explanations) mae += *e.fidelity_mae;
                r.fidelity_mae = mae / static_cast<double>(explanations.size());
                double r2 = 0.0;
                std::size_t with_r2 = 0;
                for (const auto& e : explanations) {
                    if (e.fidelity_r2) {
                        r2 += *e.fidelity_r2;
                        ++with_r2;
                    }
                }
                if (with_r2) r.fidelity_r2 = r2 / static_cast<double>(with_r2);
            }
            r.avg_nonzero = metrics::avg_nonzero(explanations);
            r.relaxed_robustness =
                metrics::relaxed_robustness(explainer, instances,
                                            ws.sparse() ? metrics::PerturbationMode::text
                                                        : metrics::PerturbationMode::dense,
                                            feature_std)
                    .score;
            r.faithfulness = metrics::faithfulness(predictor, explainer, instances).score;
            const auto altruist = metrics::altruist_untruthfulness(predictor, explainer, instances, grouping);
            r.altruist_count = altruist.mean_count;
            r.altruist_pct = altruist.mean_pct;
            outcome.reports.push_back(std::move(r));
        }
    }
    return outcome;
}

void write_reports(const EvaluateOutcome& outcome, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    {
        std::ofstream csv(out_dir / "report.csv", std::ios::binary);
        metrics::write_report_csv(csv, outcome.reports);
    }
    std::ofstream md(out_dir / "report.md", std::ios::binary);
    metrics::write_report_markdown(md, outcome.reports);
}

}  // namespace lionets::app
