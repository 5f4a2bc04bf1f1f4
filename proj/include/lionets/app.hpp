#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lionets/explanation.hpp"
#include "lionets/metrics.hpp"
#include "lionets/neural.hpp"
#include "lionets/numerics.hpp"
#include "lionets/text.hpp"

namespace lionets::app {

namespace fs = std::filesystem;

enum class DataKind { toy, text, timeseries };

DataKind parse_data_kind(std::string_view name);
std::string_view to_string(DataKind kind);

/// manifest.json at the workspace root.
struct Manifest {
    DataKind kind = DataKind::toy;
    std::uint64_t seed = 0;
    std::string train_file = "train.csv";
    std::string val_file = "val.csv";
    Task task = Task::binary_classification;
    std::size_t features = 0;  // input width of the predictor
    std::size_t window = 0;    // timeseries
    std::size_t sensors = 0;   // timeseries
    double threshold = 0.0;    // timeseries classification: label 1 when RUL <= threshold
    double rul_scale = 1.0;    // timeseries regression target is RUL / rul_scale
    std::optional<std::size_t> max_features;  // text

    nlohmann::json to_json() const;
    static Manifest from_json(const nlohmann::json& doc);
};

struct GenerateOptions {
    DataKind kind = DataKind::toy;
    std::uint64_t seed = 7;
    std::optional<std::size_t> samples;  // rows, sentences or units
    std::size_t features = 6;
    std::size_t sensors = 5;
    std::size_t window = 20;
    double threshold = 40.0;
    bool regression = false;
    std::size_t max_features = 300;
    double val_ratio = 0.2;
};

void generate_data(const fs::path& workspace, const GenerateOptions& opts, std::ostream& log);

struct TrainOptions {
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> batch_size;
    std::optional<double> learning_rate;
    std::optional<std::uint64_t> seed;  // defaults to the manifest seed
};

/// Hidden and output layers of the predictor for a data kind.
std::vector<LayerSpec> predictor_architecture(DataKind kind, Task task);

/// Training settings used by train-predictor / train-decoder when no flag overrides them.
TrainConfig predictor_train_config(DataKind kind, Task task, const TrainOptions& opts,
                                   std::uint64_t manifest_seed);
TrainConfig decoder_train_config(DataKind kind, const TrainOptions& opts, std::uint64_t manifest_seed);

void train_predictor(const fs::path& workspace, const TrainOptions& opts, std::ostream& log);
void train_decoder(const fs::path& workspace, const TrainOptions& opts, std::ostream& log);
void compute_stats(const fs::path& workspace, std::ostream& log);

struct Split {
    std::string name;
    std::vector<std::string> ids;
    Matrix x;
    Vec y;                           // 0/1 labels, or scaled RUL for regression
    std::vector<std::string> texts;  // text kind only
};

enum class Stage { data, predictor, decoder, stats };

/// Everything a command needs, loaded and validated up front. Immutable once loaded.
class Workspace {
public:
    static Workspace load(const fs::path& dir, Stage required);

    const fs::path& dir() const noexcept { return dir_; }
    const Manifest& manifest() const noexcept { return manifest_; }
    const Split& train() const noexcept { return train_; }
    const Split& val() const noexcept { return val_; }
    const Split& split(std::string_view name) const;
    const data::Vocabulary& vocabulary() const;
    const MLPModel& predictor() const noexcept { return predictor_; }
    const MLPModel& decoder() const noexcept { return decoder_; }
    const FeatureStats& latent_stats() const noexcept { return latent_stats_; }
    /// Per-input-feature statistics of the training split.
    const FeatureStats& input_stats() const noexcept { return input_stats_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    bool sparse() const noexcept { return manifest_.kind == DataKind::text; }

    struct InstanceRef {
        const Split* split = nullptr;
        std::size_t index = 0;
    };
    /// Ids look like "val-3"; throws ValidationError for unknown ids.
    InstanceRef find(std::string_view id) const;

    double predict(std::span<const double> x) const;

private:
    fs::path dir_;
    Manifest manifest_;
    Split train_, val_;
    std::optional<data::Vocabulary> vocab_;
    MLPModel predictor_, decoder_;
    FeatureStats latent_stats_, input_stats_;
    std::vector<std::string> feature_names_;
};

fs::path manifest_path(const fs::path& workspace);
fs::path predictor_path(const fs::path& workspace);
fs::path decoder_path(const fs::path& workspace);
fs::path stats_path(const fs::path& workspace);
fs::path vocabulary_path(const fs::path& workspace);

void save_feature_stats(const FeatureStats& stats, const fs::path& path);
FeatureStats load_feature_stats(const fs::path& path);

enum class ExplainerKind { lionets, lime, gxi };

ExplainerKind parse_explainer(std::string_view name);
std::string_view to_string(ExplainerKind kind);

struct ExplainSettings {
    ExplainerKind explainer = ExplainerKind::lionets;
    std::uint64_t seed = 0;
    std::size_t neighbours = 2000;
    std::size_t lime_samples = 5000;
    bool fast = false;  // single-alpha grid for LioNets
};

/// Runs one explainer; LIME on non-sparse, non-windowed data is a ValidationError.
Explanation run_explainer(const Workspace& ws, std::span<const double> instance,
                          const ExplainSettings& settings);

/// Explanation file contents for an instance (counterfactuals for text, sensor
/// aggregation for windows).
nlohmann::json explanation_json(const Workspace& ws, const std::string& instance_id,
                                std::span<const double> instance, const ExplainSettings& settings,
                                std::size_t top_k = 10);

struct ExplainOutputs {
    fs::path explanation;
    fs::path bar_plot;
    std::optional<fs::path> sensors;
};

ExplainOutputs explain_instance(const Workspace& ws, const std::string& instance_id,
                                const ExplainSettings& settings, const fs::path& out_dir,
                                std::size_t top_k = 10);

struct EvaluateOptions {
    std::vector<ExplainerKind> explainers{ExplainerKind::lionets, ExplainerKind::lime,
                                          ExplainerKind::gxi};
    std::vector<std::string> splits{"val"};
    std::size_t instances = 20;
    ExplainSettings settings;  // explainer field ignored
    /// Fraction of instances an explainer may fail on before the run is rejected.
    double max_failure_rate = 0.1;
};

struct EvaluateOutcome {
    std::vector<metrics::MetricReport> reports;
    std::vector<std::string> failures;  // one line per rejected explainer/split
    bool ok() const noexcept { return failures.empty(); }
};

/// Evenly spaced instance indices of a split.
std::vector<std::size_t> evaluation_indices(std::size_t split_size, std::size_t count);

EvaluateOutcome evaluate(const Workspace& ws, const EvaluateOptions& opts);

/// Writes report.csv and report.md into `out_dir`.
void write_reports(const EvaluateOutcome& outcome, const fs::path& out_dir);

}  // namespace lionets::app
