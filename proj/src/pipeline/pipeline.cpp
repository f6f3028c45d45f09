#include "causalrl/pipeline/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <type_traits>
#include <utility>

#include "causalrl/data/csv.hpp"
#include "causalrl/data/preprocess.hpp"
#include "causalrl/errors.hpp"
#include "causalrl/scoring/bic.hpp"

namespace causalrl::pipeline {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string describe(const std::string& stage, const std::string& cause, const std::vector<fs::path>& written) {
    std::string msg = "stage '" + stage + "' failed: " + cause + "; partial artifacts: ";
    if (written.empty()) return msg + "none";
    for (std::size_t k = 0; k < written.size(); ++k) msg += (k ? ", " : "") + written[k].string();
    return msg;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json log_to_json(const policy::IterationLog& log) {
    return {{"iteration", log.iteration},
            {"mean_reward", finite_or_null(log.mean_reward)},
            {"best_reward", finite_or_null(log.best_reward)},
            {"mean_h", finite_or_null(log.mean_h)},
            {"cyclic_fraction", log.cyclic_fraction},
            {"lambda1", log.lambda1},
            {"lambda2", log.lambda2},
            {"actor_loss", finite_or_null(log.actor_loss)},
            {"critic_loss", finite_or_null(log.critic_loss)}};
}

json strengths_to_json(const graph::CausalGraph& g, const strength::StrengthMatrix& s) {
    json edges = json::array();
    for (const auto& [e, v] : s.entries) {
        edges.push_back({{"from", g.variables[e.first].name},
                         {"to", g.variables[e.second].name},
                         {"log_strength", finite_or_null(v.log_strength)},
                         {"raw", finite_or_null(v.raw)},
                         {"degenerate", v.degenerate},
                         {"tie_corrections", v.tie_corrections}});
    }
    return edges;
}

// Output bookkeeping: each stage runs under a name, writes are recorded.
class Runner {
public:
    explicit Runner(fs::path dir) : dir_(std::move(dir)) {}

    template <class F>
    auto stage(const std::string& name, F&& body) -> decltype(body()) {
        const auto start = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(body())>) {
                body();
                record(name, start);
            } else {
                auto result = body();
                record(name, start);
                return result;
            }
        } catch (const ValidationError&) {
            throw;
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            fail(name, e.what());
        }
    }

    fs::path write(const std::string& file, const std::string& content) {
        const fs::path p = dir_ / file;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
        out << content;
        out.close();
        if (!out) throw std::runtime_error("write to '" + p.string() + "' failed");
        written_.push_back(p);
        files_[file] = p;
        return p;
    }

    [[noreturn]] void fail(const std::string& stage, const std::string& cause) {
        write_manifest(stage);
        throw StageError(stage, cause, written_);
    }

    void write_manifest(const std::string& failed_stage) {
        json j{{"files", json::array()}, {"failed_stage", failed_stage.empty() ? json(nullptr) : json(failed_stage)}};
        for (const auto& p : written_) j["files"].push_back(p.filename().string());
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        if (out) out << j.dump(2) << "\n";
    }

    const std::map<std::string, fs::path>& files() const { return files_; }
    const std::vector<std::pair<std::string, double>>& timings() const { return timings_; }

private:
    void record(const std::string& name, std::chrono::steady_clock::time_point start) {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        timings_.emplace_back(name, dt.count());
    }

    fs::path dir_;
    std::vector<fs::path> written_;
    std::map<std::string, fs::path> files_;
    std::vector<std::pair<std::string, double>> timings_;
};

std::string csv_text(const data::Dataset& ds) {
    std::ostringstream out;
    data::write_csv(out, ds);
    return out.str();
}

}  // namespace

StageError::StageError(std::string stage, const std::string& cause, std::vector<fs::path> written)
    : std::runtime_error(describe(stage, cause, written)), stage_(std::move(stage)), written_(std::move(written)) {}

RunArtifacts run(const PipelineConfig& cfg, const ProgressCallback& progress) {
    cfg.validate();

    // Schema and header are checked up front so that a missing target never reaches training.
    std::optional<data::VariableTable> schema;
    if (cfg.schema) schema = data::load_schema(*cfg.schema);
    if (schema && !schema->find(cfg.target)) {
        throw ValidationError("target '" + cfg.target + "' is not in the schema");
    }

    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw StageError("output", "cannot create '" + cfg.out.string() + "': " + ec.message(), {});

    Runner runner(cfg.out);
    RunArtifacts art;
    art.config_snapshot = to_json(cfg, true);
    runner.write("config.snapshot.json", art.config_snapshot.dump(2) + "\n");

    data::PreprocessConfig pre = cfg.preprocess;
    pre.target = cfg.target;

    const data::Dataset raw = runner.stage("load", [&] { return data::load_csv(cfg.data, schema); });
    if (!raw.variables().find(cfg.target)) {
        throw ValidationError("target '" + cfg.target + "' is not a column of '" + cfg.data.string() + "'");
    }
    for (const auto& name : pre.drop_columns) {
        if (name == cfg.target) throw ValidationError("target '" + cfg.target + "' cannot be dropped");
    }

    const data::Dataset encoded = runner.stage("encode", [&] { return data::encode_categoricals(raw); });
    const data::Dataset filtered =
        runner.stage("filter", [&] { return data::multicollinearity_filter(encoded, pre).dataset; });
    const data::Dataset processed = runner.stage("standardize", [&] {
        data::Dataset ds = pre.standardize ? data::standardize(filtered) : filtered;
        runner.write("processed.csv", csv_text(ds));
        return ds;
    });
    art.notes = processed.notes();

    const scoring::BicScorer scorer(processed, {cfg.regression});
    std::string metrics_lines;
    const policy::TrainResult trained = runner.stage("train", [&] {
        auto result = policy::train(cfg.trainer, processed, scorer, [&](const policy::IterationLog& log) {
            metrics_lines += log_to_json(log).dump() + "\n";
            if (progress) progress(log);
        });
        runner.write("metrics.jsonl", metrics_lines);
        return result;
    });
    art.state = trained.state;

    art.strengths = runner.stage("strength", [&] {
        auto s = strength::edge_strengths(trained.graph.adjacency, processed);
        runner.write("strengths.json", strengths_to_json(trained.graph, s).dump(2) + "\n");
        return s;
    });

    art.graph = runner.stage("prune", [&] { return strength::prune(trained.graph, art.strengths, cfg.prune_threshold); });

    const auto& logs = trained.state.logs;
    art.metrics.best_reward = trained.state.best_reward;
    art.metrics.iterations = trained.state.iterations_done;
    art.metrics.cyclic_fraction_final = logs.empty() ? 0.0 : logs.back().cyclic_fraction;
    art.metrics.bic = scorer.graph_bic(art.graph.adjacency);
    art.metrics.search_bic = scorer.graph_bic(trained.search_graph);
    art.metrics.refined_edges_removed = trained.state.refined_edges_removed;
    art.metrics.pruned_edges = trained.graph.adjacency.edge_count() - art.graph.adjacency.edge_count();
    art.metrics.repaired = trained.state.repaired;

    runner.stage("emit", [&] {
        runner.write("graph.json", emit_json(art.graph, art.strengths, to_json(cfg, false), art.metrics));
        runner.write("graph.dot", emit_dot(art.graph));
        runner.write("report.md", emit_report(art.graph, art.strengths, art.notes, art.metrics,
                                              {cfg.target, cfg.max_path_length}));
    });

    json timings = json::object();
    for (const auto& [name, seconds] : runner.timings()) timings[name] = seconds;
    runner.write("timings.json", timings.dump(2) + "\n");
    runner.write_manifest("");

    art.files = runner.files();
    art.files["manifest.json"] = cfg.out / "manifest.json";
    art.timings = runner.timings();
    return art;
}

double score_graph(const fs::path& data, const graph::CausalGraph& g, const ScoreOptions& options) {
    std::optional<data::VariableTable> schema;
    if (options.schema) schema = data::load_schema(*options.schema);
    const data::Dataset encoded = data::encode_categoricals(data::load_csv(data, schema));

    std::vector<std::size_t> keep;
    for (const auto& v : g.variables) {
        const auto idx = encoded.variables().find(v.name);
        if (!idx) throw ValidationError("graph variable '" + v.name + "' is not a column of '" + data.string() + "'");
        keep.push_back(*idx);
    }
    const auto& all = encoded.samples();
    numeric::Matrix cols(all.rows(), keep.size());
    for (std::size_t r = 0; r < all.rows(); ++r)
        for (std::size_t c = 0; c < keep.size(); ++c) cols(r, c) = all(r, keep[c]);
    data::Dataset ds(encoded.variables().subset(keep), std::move(cols), encoded.notes());
    if (options.standardize) ds = data::standardize(ds);

    const scoring::BicScorer scorer(ds, {options.regression});
    return scorer.graph_bic(g.adjacency);
}

SynthFiles generate_synthetic(const SynthOptions& options) {
    options.generator.validate();
    if (options.samples < 2) throw ValidationError("synth: need at least 2 samples");

    SynthFiles files;
    files.model = sim::random_model(options.generator);
    const data::Dataset ds = sim::generate(files.model, options.samples, options.generator.seed + 1);

    std::error_code ec;
    fs::create_directories(options.out, ec);
    if (ec) throw std::runtime_error("cannot create '" + options.out.string() + "': " + ec.message());

    files.data = options.out / "data.csv";
    files.truth = options.out / "truth.json";

    graph::CausalGraph truth{files.model.graph, ds.variables(), {}};
    const auto& gen = options.generator;
    json config{{"d", gen.d},
                {"edge-prob", gen.edge_probability},
                {"mechanism", std::string(sim::to_string(gen.mechanism))},
                {"samples", options.samples},
                {"seed", gen.seed}};
    json j = graph_to_json(truth, {}, config, {});
    j.erase("metrics");
    json noise = json::array();
    for (double s : files.model.noise_scales) noise.push_back(s);
    j["noise_scales"] = std::move(noise);

    std::ofstream csv(files.data, std::ios::binary);
    data::write_csv(csv, ds);
    std::ofstream tj(files.truth, std::ios::binary);
    tj << j.dump(2) << "\n";
    if (!csv || !tj) throw std::runtime_error("synth: writing to '" + options.out.string() + "' failed");
    return files;
}

}  // namespace causalrl::pipeline
