#ifndef CAUSALRL_PIPELINE_PIPELINE_HPP
#define CAUSALRL_PIPELINE_PIPELINE_HPP

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "causalrl/graph/adjacency.hpp"
#include "causalrl/pipeline/config.hpp"
#include "causalrl/pipeline/emit.hpp"
#include "causalrl/policy/trainer.hpp"
#include "causalrl/sim/scm.hpp"
#include "causalrl/strength/iie.hpp"

namespace causalrl::pipeline {

// A stage failed after validation. Carries the stage name and the files
// already written to the output directory.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& cause, std::vector<std::filesystem::path> written);

    const std::string& stage() const { return stage_; }
    const std::vector<std::filesystem::path>& written() const { return written_; }

private:
    std::string stage_;
    std::vector<std::filesystem::path> written_;
};

struct RunArtifacts {
    graph::CausalGraph graph;            // pruned, with strengths
    strength::StrengthMatrix strengths;  // for every edge of the trained graph
    policy::TrainState state;
    RunMetrics metrics;
    data::DatasetNotes notes;
    nlohmann::json config_snapshot;
    std::map<std::string, std::filesystem::path> files;  // "graph.json" -> path
    std::vector<std::pair<std::string, double>> timings;  // seconds per stage, in order
};

using ProgressCallback = std::function<void(const policy::IterationLog&)>;

// load -> encode -> filter -> standardize -> train -> strengths -> prune -> emit.
// Writes graph.json, graph.dot, report.md, metrics.jsonl, config.snapshot.json,
// processed.csv, strengths.json, timings.json and manifest.json under cfg.out.
// Configuration problems (including a missing target) raise ValidationError
// before training starts; later failures raise StageError.
RunArtifacts run(const PipelineConfig& cfg, const ProgressCallback& progress = {});

struct ScoreOptions {
    std::optional<std::filesystem::path> schema;
    scoring::RegressionKind regression = scoring::RegressionKind::Linear;
    bool standardize = true;
};

// graph_bic of `g` on the CSV columns named by its variables (in graph order),
// after categorical encoding and optional standardisation.
double score_graph(const std::filesystem::path& data, const graph::CausalGraph& g, const ScoreOptions& options = {});

struct SynthOptions {
    sim::GeneratorConfig generator;
    std::size_t samples = 2000;
    std::filesystem::path out = "synth";
};

struct SynthFiles {
    std::filesystem::path data;   // data.csv
    std::filesystem::path truth;  // truth.json, readable with load_graph_json
    sim::StructuralModel model;
};

// Data are drawn with seed + 1 so that the graph and the samples use different streams.
SynthFiles generate_synthetic(const SynthOptions& options);

}  // namespace causalrl::pipeline

#endif  // CAUSALRL_PIPELINE_PIPELINE_HPP
