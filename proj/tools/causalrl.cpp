// causalrl command-line front end: discover, synth, score.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "causalrl/errors.hpp"
#include "causalrl/pipeline/config.hpp"
#include "causalrl/pipeline/emit.hpp"
#include "causalrl/pipeline/pipeline.hpp"

using namespace causalrl;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

// Each flag lands in `overrides` under the same key the config file uses.
struct Overrides {
    json values = json::object();

    template <class T>
    void add(CLI::App* app, const std::string& key, const std::string& help) {
        app->add_option_function<T>("--" + key, [this, key](const T& v) { values[key] = v; }, help);
    }
    void add_flag(CLI::App* app, const std::string& key, const std::string& help) {
        app->add_option_function<bool>("--" + key, [this, key](const bool& v) { values[key] = v; }, help)
            ->expected(0, 1)
            ->default_str("true");
    }
};

int discover(const std::optional<std::string>& config_path, const Overrides& overrides, bool quiet) {
    pipeline::PipelineConfig cfg;
    if (config_path) cfg = pipeline::load_config(*config_path);
    pipeline::apply_json(cfg, overrides.values);

    const std::size_t every = std::max<std::size_t>(1, cfg.trainer.iterations / 20);
    const auto progress = [&](const policy::IterationLog& log) {
        if (quiet || (log.iteration + 1) % every != 0) return;
        std::fprintf(stderr, "iter %6zu  mean reward %12.3f  best %12.3f  cyclic %.2f\n", log.iteration + 1,
                     log.mean_reward, log.best_reward, log.cyclic_fraction);
    };
    const auto art = pipeline::run(cfg, progress);

    std::cout << "edges: " << art.graph.adjacency.edge_count() << "  bic: " << art.metrics.bic << "\n";
    for (const auto& [name, path] : art.files) std::cout << "  " << path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal structure discovery with a reinforcement-learning search"};
    app.require_subcommand(1);

    auto* disc = app.add_subcommand("discover", "learn a causal graph from a CSV file and write a report");
    std::optional<std::string> config_path;
    bool quiet = false;
    Overrides ov;
    disc->add_option("--config", config_path, "JSON config file; flags override its values");
    disc->add_flag("-q,--quiet", quiet, "no progress output");
    ov.add<std::string>(disc, "data", "input CSV");
    ov.add<std::string>(disc, "schema", "schema JSON with variable kinds and denotations");
    ov.add<std::string>(disc, "target", "target variable name");
    ov.add<std::string>(disc, "out", "output directory");
    ov.add<std::uint64_t>(disc, "seed", "random seed");
    ov.add<std::size_t>(disc, "iterations", "training iterations");
    ov.add<std::size_t>(disc, "graphs-per-iter", "graphs sampled per iteration");
    ov.add<std::size_t>(disc, "batch-size", "rows per data batch");
    ov.add<double>(disc, "lr", "actor learning rate");
    ov.add<double>(disc, "critic-lr", "critic learning rate");
    ov.add<std::size_t>(disc, "d-model", "encoder width");
    ov.add<std::size_t>(disc, "heads", "attention heads");
    ov.add<std::size_t>(disc, "layers", "encoder layers");
    ov.add<std::size_t>(disc, "ff-width", "encoder feed-forward width");
    ov.add<std::size_t>(disc, "decoder-hidden", "decoder hidden width");
    ov.add<std::size_t>(disc, "critic-hidden", "critic hidden width");
    ov.add_flag(disc, "positional-encoding", "add positional encodings to the encoder input");
    ov.add_flag(disc, "refine", "greedy edge deletion after the search");
    ov.add<double>(disc, "lambda1", "initial cyclicity indicator weight");
    ov.add<double>(disc, "lambda2", "initial acyclicity penalty weight");
    ov.add<double>(disc, "lambda1-cap", "upper bound for lambda1");
    ov.add<double>(disc, "lambda2-cap", "upper bound for lambda2");
    ov.add<double>(disc, "lambda-growth", "penalty growth factor");
    ov.add<std::size_t>(disc, "lambda-interval", "iterations between penalty increases");
    ov.add_flag(disc, "lambda-relative", "penalty weights are multiples of the BIC range");
    ov.add<std::string>(disc, "regression", "linear or quadratic");
    ov.add<double>(disc, "correlation-threshold", "multicollinearity threshold in (0, 1]");
    ov.add_flag(disc, "standardize", "z-score columns before the search");
    ov.add<std::vector<std::string>>(disc, "drop-columns", "columns removed before the search");
    ov.add<double>(disc, "prune-threshold", "minimum log strength kept");
    ov.add<std::size_t>(disc, "max-path-length", "longest indirect path in the report");

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset with a known graph");
    pipeline::SynthOptions so;
    std::string mechanism = "linear";
    synth->add_option("--d", so.generator.d, "number of variables")->capture_default_str();
    synth->add_option("--edge-prob", so.generator.edge_probability, "edge probability")->capture_default_str();
    synth->add_option("--samples", so.samples, "rows")->capture_default_str();
    synth->add_option("--mechanism", mechanism, "linear or quadratic")->capture_default_str();
    synth->add_option("--seed", so.generator.seed, "random seed")->capture_default_str();
    synth->add_option("--out", so.out, "output directory")->capture_default_str();

    auto* score = app.add_subcommand("score", "BIC of a graph JSON on a CSV file");
    std::string score_data, score_graph, score_regression = "linear";
    pipeline::ScoreOptions sopt;
    bool raw = false;
    score->add_option("--data", score_data, "input CSV")->required();
    score->add_option("--graph", score_graph, "graph JSON (graph.json or truth.json)")->required();
    score->add_option("--schema", sopt.schema, "schema JSON");
    score->add_option("--regression", score_regression, "linear or quadratic")->capture_default_str();
    score->add_flag("--raw", raw, "score unstandardised columns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitValidation;
    }

    try {
        if (*disc) return discover(config_path, ov, quiet);
        if (*synth) {
            so.generator.mechanism = sim::parse_mechanism_kind(mechanism);
            const auto files = pipeline::generate_synthetic(so);
            std::cout << files.data.string() << "\n" << files.truth.string() << "\n";
            return 0;
        }
        if (*score) {
            sopt.regression = scoring::parse_regression_kind(score_regression);
            sopt.standardize = !raw;
            const auto g = pipeline::load_graph_json(score_graph);
            std::printf("%.10g\n", pipeline::score_graph(score_data, g, sopt));
            return 0;
        }
    } catch (const ValidationError& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitValidation;
    } catch (const UsageError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}
