// lionex: command-line driver for the LioNets pipeline.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>

#include "lionets/app.hpp"
#include "lionets/errors.hpp"
#include "lionets/geometry.hpp"
#include "lionets/service.hpp"

namespace {

using namespace lionets;
using namespace lionets::app;

constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitPortBusy = 3;

fs::path resolve_workspace(const std::string& flag) {
    if (const char* env = std::getenv("LIONEX_WORKSPACE"); env && *env) return env;
    return flag;
}

void add_train_options(CLI::App* cmd, TrainOptions& opts) {
    cmd->add_option("--epochs", opts.epochs, "Training epochs");
    cmd->add_option("--batch-size", opts.batch_size, "Mini-batch size");
    cmd->add_option("--lr", opts.learning_rate, "Adam learning rate");
    cmd->add_option("--seed", opts.seed, "Initialisation and shuffling seed (default: manifest seed)");
}

void add_explain_options(CLI::App* cmd, ExplainSettings& s, std::optional<std::uint64_t>& seed) {
    cmd->add_option("--seed", seed, "Explanation seed (default: manifest seed)");
    cmd->add_option("--neighbours", s.neighbours, "LioNets neighbourhood size")->check(CLI::PositiveNumber);
    cmd->add_option("--lime-samples", s.lime_samples, "LIME perturbation count")->check(CLI::PositiveNumber);
    cmd->add_flag("--fast", s.fast, "Fit the LioNets surrogate with alpha 1 only");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"LioNets local interpretation pipeline"};
    cli.require_subcommand(1);
    std::string workspace_flag = "workspace";
    cli.add_option("-w,--workspace", workspace_flag, "Workspace directory (LIONEX_WORKSPACE overrides)");

    GenerateOptions gen;
    std::string kind = "toy";
    auto* generate = cli.add_subcommand("generate-data", "Write a synthetic dataset and manifest");
    generate->add_option("--kind", kind, "toy, text or timeseries")
        ->check(CLI::IsMember({"toy", "text", "timeseries"}));
    generate->add_option("--seed", gen.seed, "Generator seed");
    generate->add_option("--samples", gen.samples, "Rows (toy), sentences (text) or units (timeseries)");
    generate->add_option("--features", gen.features, "Toy feature count");
    generate->add_option("--sensors", gen.sensors, "Timeseries sensor count");
    generate->add_option("--window", gen.window, "Timeseries window length");
    generate->add_option("--threshold", gen.threshold, "RUL threshold for the binary timeseries label");
    generate->add_flag("--regression", gen.regression, "Timeseries predictor regresses scaled RUL");
    generate->add_option("--max-features", gen.max_features, "Text vocabulary cap");
    generate->add_option("--val-ratio", gen.val_ratio, "Validation fraction");

    TrainOptions predictor_opts, decoder_opts;
    auto* train_pred = cli.add_subcommand("train-predictor", "Train the black-box predictor");
    add_train_options(train_pred, predictor_opts);
    auto* train_dec = cli.add_subcommand("train-decoder", "Train the latent-to-input decoder");
    add_train_options(train_dec, decoder_opts);
    auto* stats = cli.add_subcommand("compute-stats", "Write latent feature statistics");

    ExplainSettings explain_settings;
    std::optional<std::uint64_t> explain_seed;
    std::string instance_id, explainer = "lionets";
    std::string explain_out;
    std::size_t top_k = 10;
    auto* explain_cmd = cli.add_subcommand("explain", "Explain one instance");
    explain_cmd->add_option("--instance", instance_id, "Instance id, e.g. val-3")->required();
    explain_cmd->add_option("--explainer", explainer, "lionets, lime or gxi")
        ->check(CLI::IsMember({"lionets", "lime", "gxi"}));
    explain_cmd->add_option("--top-k", top_k, "Counterfactual list length")->check(CLI::PositiveNumber);
    explain_cmd->add_option("--out", explain_out, "Output directory (default: <workspace>/explanations)");
    add_explain_options(explain_cmd, explain_settings, explain_seed);

    EvaluateOptions eval;
    std::optional<std::uint64_t> eval_seed;
    std::vector<std::string> eval_explainers{"lionets", "lime", "gxi"};
    std::vector<std::string> eval_splits{"val"};
    std::string eval_out;
    auto* evaluate_cmd = cli.add_subcommand("evaluate", "Compute the metric report");
    evaluate_cmd->add_option("--explainers", eval_explainers, "Explainers to compare")
        ->check(CLI::IsMember({"lionets", "lime", "gxi"}));
    evaluate_cmd->add_option("--split", eval_splits, "train and/or val")->check(CLI::IsMember({"train", "val"}));
    evaluate_cmd->add_option("--instances", eval.instances, "Instances per split")->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--out", eval_out, "Report directory (default: <workspace>/reports)");
    add_explain_options(evaluate_cmd, eval.settings, eval_seed);

    std::string host = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
    auto* serve = cli.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
    serve->add_option("--static", static_dir, "Directory served at /");

    std::string dist_instance, dist_out;
    std::uint64_t dist_seed = 0;
    std::size_t dist_count = 2000;
    auto* distances = cli.add_subcommand("distances", "Histogram the neighbourhood distance distributions");
    distances->add_option("--instance", dist_instance, "Instance id")->required();
    distances->add_option("--neighbours", dist_count, "Neighbours per series")->check(CLI::PositiveNumber);
    distances->add_option("--seed", dist_seed, "Seed");
    distances->add_option("--out", dist_out, "Histogram CSV path")->required();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    const fs::path ws = resolve_workspace(workspace_flag);
    try {
        if (*generate) {
            gen.kind = parse_data_kind(kind);
            generate_data(ws, gen, std::cout);
        } else if (*train_pred) {
            train_predictor(ws, predictor_opts, std::cout);
        } else if (*train_dec) {
            train_decoder(ws, decoder_opts, std::cout);
        } else if (*stats) {
            compute_stats(ws, std::cout);
        } else if (*explain_cmd) {
            const Workspace loaded = Workspace::load(ws, Stage::stats);
            explain_settings.explainer = parse_explainer(explainer);
            explain_settings.seed = explain_seed.value_or(loaded.manifest().seed);
            const fs::path out = explain_out.empty() ? ws / "explanations" : fs::path(explain_out);
            const auto files = explain_instance(loaded, instance_id, explain_settings, out, top_k);
            std::cout << "wrote " << files.explanation.string() << '\n'
                      << "wrote " << files.bar_plot.string() << '\n';
            if (files.sensors) std::cout << "wrote " << files.sensors->string() << '\n';
        } else if (*evaluate_cmd) {
            const Workspace loaded = Workspace::load(ws, Stage::stats);
            eval.explainers.clear();
            for (const auto& e : eval_explainers) eval.explainers.push_back(parse_explainer(e));
            eval.splits = eval_splits;
            eval.settings.seed = eval_seed.value_or(loaded.manifest().seed);
            const auto outcome = evaluate(loaded, eval);
            const fs::path out = eval_out.empty() ? ws / "reports" : fs::path(eval_out);
            write_reports(outcome, out);
            std::cout << "wrote " << (out / "report.csv").string() << '\n'
                      << "wrote " << (out / "report.md").string() << '\n';
            if (!outcome.ok()) {
                std::cerr << "evaluation failed:\n";
                for (const auto& f : outcome.failures) std::cerr << "  " << f << '\n';
                return kExitFailure;
            }
        } else if (*serve) {
            const Service service(Workspace::load(ws, Stage::stats));
            std::optional<fs::path> mount;
            if (!static_dir.empty()) mount = static_dir;
            HttpServer server(service, mount);
            if (!server.bind(host, port)) {
                std::cerr << "error: port " << port << " is busy or cannot be bound\n";
                return kExitPortBusy;
            }
            std::cout << "listening on http://" << host << ':' << server.port() << std::endl;
            server.listen();
        } else if (*distances) {
            const Workspace loaded = Workspace::load(ws, Stage::stats);
            const auto ref = loaded.find(dist_instance);
            const auto x = ref.split->x.row(ref.index);
            Rng rng(dist_seed);
            const Matrix original = loaded.sparse()
                                        ? lime_mask_neighbours(x, dist_count, rng)
                                        : gaussian_column_neighbours(x, loaded.input_stats(), dist_count, rng);
            NeighbourhoodConfig cfg;
            cfg.size = dist_count;
            cfg.seed = dist_seed;
            const auto study = distance_distributions(loaded.predictor(), loaded.decoder(),
                                                      loaded.latent_stats(), x, original, cfg);
            std::ofstream out(dist_out, std::ios::binary);
            if (!out) throw ValidationError("cannot write " + dist_out);
            write_histogram_csv(out, study.histogram);
            std::cout << "wrote " << dist_out << '\n';
        }
    } catch (const TrainingDivergedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return 0;
}
