#ifndef CAUSALRL_PIPELINE_EMIT_HPP
#define CAUSALRL_PIPELINE_EMIT_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "causalrl/data/dataset.hpp"
#include "causalrl/graph/adjacency.hpp"
#include "causalrl/strength/iie.hpp"

namespace causalrl::pipeline {

inline constexpr int kGraphSchemaVersion = 1;

struct RunMetrics {
    double best_reward = 0.0;
    std::size_t iterations = 0;
    double cyclic_fraction_final = 0.0;
    double bic = 0.0;               // score of the emitted (pruned) graph
    double search_bic = 0.0;        // score of the graph returned by the search
    std::size_t refined_edges_removed = 0;
    std::size_t pruned_edges = 0;   // removed by the strength threshold
    bool repaired = false;
};

// {"version", "variables": [{index, name, denotation, kind}],
//  "edges": [{from, to, log_strength, degenerate}], "config", "metrics"}.
// Objects serialise with sorted keys; edges are sorted by (from, to).
nlohmann::json graph_to_json(const graph::CausalGraph& g, const strength::StrengthMatrix& strengths,
                             const nlohmann::json& config, const RunMetrics& metrics);
std::string emit_json(const graph::CausalGraph& g, const strength::StrengthMatrix& strengths,
                      const nlohmann::json& config, const RunMetrics& metrics);

// Inverse of graph_to_json for the graph part. Throws ValidationError on
// malformed documents, unknown versions or edges that form a cycle.
graph::CausalGraph parse_graph_json(const nlohmann::json& j);
graph::CausalGraph load_graph_json(const std::filesystem::path& path);

// Graphviz digraph. Nodes in index order labelled "name (Xk)", edges in
// (from, to) order labelled with the log strength to two decimals when known.
std::string emit_dot(const graph::CausalGraph& g);

struct ReportOptions {
    std::string target;
    std::size_t max_path_length = 3;
};

// Markdown risk report: direct causes of the target ranked by strength,
// indirect paths up to max_path_length edges with their weakest link, the
// remaining relationships grouped by connected component, and data-quality notes.
std::string emit_report(const graph::CausalGraph& g, const strength::StrengthMatrix& strengths,
                        const data::DatasetNotes& notes, const RunMetrics& metrics, const ReportOptions& options);

}  // namespace causalrl::pipeline

#endif  // CAUSALRL_PIPELINE_EMIT_HPP
