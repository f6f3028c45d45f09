#include "causalrl/pipeline/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "causalrl/errors.hpp"

namespace causalrl::pipeline {

namespace {

using graph::Edge;
using nlohmann::json;

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

double strength_of(const graph::CausalGraph& g, const Edge& e) {
    const auto it = g.strengths.find(e);
    return it == g.strengths.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
}

std::string strength_text(double v) { return std::isnan(v) ? "n/a" : fixed2(v); }

// NaN sorts last.
bool stronger(double a, double b) {
    if (std::isnan(a)) return false;
    if (std::isnan(b)) return true;
    return a > b;
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string label(const graph::CausalGraph& g, std::size_t i) {
    return i < g.variables.size() ? g.variables.label(i) : "node " + std::to_string(i);
}

struct Path {
    std::vector<std::size_t> nodes;
    double weakest = 0.0;
};

void collect_paths(const graph::CausalGraph& g, std::size_t target, std::size_t max_len, std::vector<std::size_t>& stack,
                   std::vector<Path>& out) {
    // stack holds a path ending at some node, walked backwards from the target.
    const std::size_t head = stack.back();
    const std::size_t edges_so_far = stack.size() - 1;
    if (edges_so_far >= 2) {
        Path p{{stack.rbegin(), stack.rend()}, std::numeric_limits<double>::infinity()};
        for (std::size_t k = 0; k + 1 < p.nodes.size(); ++k) {
            const double s = strength_of(g, {p.nodes[k], p.nodes[k + 1]});
            p.weakest = std::isnan(s) || std::isnan(p.weakest) ? std::numeric_limits<double>::quiet_NaN() : std::min(p.weakest, s);
        }
        out.push_back(std::move(p));
    }
    if (edges_so_far == max_len) return;
    for (std::size_t parent : graph::parents(g.adjacency, head)) {
        if (std::find(stack.begin(), stack.end(), parent) != stack.end()) continue;
        stack.push_back(parent);
        collect_paths(g, target, max_len, stack, out);
        stack.pop_back();
    }
}

std::set<std::size_t> ancestors_and_self(const graph::AdjacencyMatrix& a, std::size_t target) {
    std::set<std::size_t> seen{target};
    std::vector<std::size_t> todo{target};
    while (!todo.empty()) {
        const std::size_t v = todo.back();
        todo.pop_back();
        for (std::size_t p : graph::parents(a, v))
            if (seen.insert(p).second) todo.push_back(p);
    }
    return seen;
}

}  // namespace

json graph_to_json(const graph::CausalGraph& g, const strength::StrengthMatrix& strengths, const json& config,
                   const RunMetrics& metrics) {
    g.validate();
    json vars = json::array();
    for (std::size_t i = 0; i < g.variables.size(); ++i) {
        const auto& v = g.variables[i];
        vars.push_back({{"index", i},
                        {"name", v.name},
                        {"denotation", v.denotation ? json(*v.denotation) : json(nullptr)},
                        {"kind", std::string(data::to_string(v.kind))}});
    }
    json edges = json::array();
    for (const auto& e : g.adjacency.edges()) {
        const double s = strength_of(g, e);
        const auto it = strengths.entries.find(e);
        edges.push_back({{"from", e.first},
                         {"to", e.second},
                         {"log_strength", std::isnan(s) ? json(nullptr) : json(s)},
                         {"degenerate", it != strengths.entries.end() && it->second.degenerate}});
    }
    return json{{"version", kGraphSchemaVersion},
                {"variables", std::move(vars)},
                {"edges", std::move(edges)},
                {"config", config},
                {"metrics",
                 {{"best_reward", metrics.best_reward},
                  {"iterations", metrics.iterations},
                  {"cyclic_fraction_final", metrics.cyclic_fraction_final},
                  {"bic", metrics.bic},
                  {"search_bic", metrics.search_bic},
                  {"refined_edges_removed", metrics.refined_edges_removed},
                  {"pruned_edges", metrics.pruned_edges},
                  {"repaired", metrics.repaired}}}};
}

std::string emit_json(const graph::CausalGraph& g, const strength::StrengthMatrix& strengths, const json& config,
                      const RunMetrics& metrics) {
    return graph_to_json(g, strengths, config, metrics).dump(2) + "\n";
}

graph::CausalGraph parse_graph_json(const json& j) {
    try {
        if (!j.is_object()) throw ValidationError("graph json: top level must be an object");
        const int version = j.at("version").get<int>();
        if (version != kGraphSchemaVersion) {
            throw ValidationError("graph json: unsupported version " + std::to_string(version));
        }
        graph::CausalGraph g;
        const auto& vars = j.at("variables");
        for (std::size_t i = 0; i < vars.size(); ++i) {
            const auto& v = vars.at(i);
            if (v.at("index").get<std::size_t>() != i) throw ValidationError("graph json: variables must be listed in index order");
            data::Variable var;
            var.name = v.at("name").get<std::string>();
            var.kind = data::parse_variable_kind(v.value("kind", std::string("continuous")));
            if (v.contains("denotation") && !v["denotation"].is_null()) var.denotation = v["denotation"].get<std::string>();
            g.variables.push_back(std::move(var));
        }
        g.adjacency = graph::AdjacencyMatrix(g.variables.size());
        for (const auto& e : j.at("edges")) {
            const auto from = e.at("from").get<std::size_t>();
            const auto to = e.at("to").get<std::size_t>();
            if (from >= g.variables.size() || to >= g.variables.size() || from == to) {
                throw ValidationError("graph json: edge " + std::to_string(from) + " -> " + std::to_string(to) + " is invalid");
            }
            g.adjacency.set_edge(from, to);
            if (e.contains("log_strength") && !e["log_strength"].is_null()) {
                g.strengths[{from, to}] = e["log_strength"].get<double>();
            }
        }
        if (!graph::is_dag(g.adjacency)) throw ValidationError("graph json: edges contain a directed cycle");
        g.validate();
        return g;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("graph json: ") + e.what());
    }
}

graph::CausalGraph load_graph_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open graph file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("graph file '" + path.string() + "': " + e.what());
    }
    return parse_graph_json(j);
}

std::string emit_dot(const graph::CausalGraph& g) {
    std::ostringstream out;
    out << "digraph causal {\n  rankdir=LR;\n  node [shape=box];\n";
    for (std::size_t i = 0; i < g.adjacency.size(); ++i) {
        out << "  n" << i << " [label=\"" << dot_escape(label(g, i)) << "\"];\n";
    }
    for (const auto& e : g.adjacency.edges()) {
        out << "  n" << e.first << " -> n" << e.second;
        const double s = strength_of(g, e);
        if (!std::isnan(s)) out << " [label=\"" << fixed2(s) << "\"]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

std::string emit_report(const graph::CausalGraph& g, const strength::StrengthMatrix& strengths,
                        const data::DatasetNotes& notes, const RunMetrics& metrics, const ReportOptions& options) {
    const std::size_t target = g.variables.index_of(options.target);
    const auto arrow = [&](const std::vector<std::size_t>& nodes) {
        std::string s;
        for (std::size_t k = 0; k < nodes.size(); ++k) s += (k ? " -> " : "") + label(g, nodes[k]);
        return s;
    };

    std::ostringstream out;
    out << "# Causal risk report\n\n";
    out << "Target: **" << label(g, target) << "**\n\n";
    out << "The graph below was learned from observational data. Strengths are log-scaled inverse entropy "
           "differences; larger values mean the two variables carry more similar amounts of information.\n\n";

    out << "## Direct causes\n\n";
    auto direct = graph::parents(g.adjacency, target);
    std::stable_sort(direct.begin(), direct.end(), [&](std::size_t a, std::size_t b) {
        return stronger(strength_of(g, {a, target}), strength_of(g, {b, target}));
    });
    if (direct.empty()) {
        out << "No direct causes of the target were found.\n\n";
    } else {
        for (std::size_t k = 0; k < direct.size(); ++k) {
            out << k + 1 << ". " << label(g, direct[k]) << " (strength " << strength_text(strength_of(g, {direct[k], target}))
                << ")\n";
        }
        out << "\n";
    }

    out << "## Indirect paths\n\n";
    std::vector<Path> paths;
    std::vector<std::size_t> stack{target};
    collect_paths(g, target, options.max_path_length, stack, paths);
    std::stable_sort(paths.begin(), paths.end(), [](const Path& a, const Path& b) {
        if (stronger(a.weakest, b.weakest)) return true;
        if (stronger(b.weakest, a.weakest)) return false;
        return a.nodes < b.nodes;
    });
    if (paths.empty()) {
        out << "No indirect paths of up to " << options.max_path_length << " edges reach the target.\n\n";
    } else {
        for (const auto& p : paths) out << "- " << arrow(p.nodes) << " (weakest link " << strength_text(p.weakest) << ")\n";
        out << "\n";
    }

    out << "## Other relationships\n\n";
    const auto upstream = ancestors_and_self(g.adjacency, target);
    std::vector<Edge> other;
    for (const auto& e : g.adjacency.edges())
        if (!upstream.count(e.second)) other.push_back(e);
    if (other.empty()) {
        out << "No relationships outside the paths to the target.\n\n";
    } else {
        // Weakly connected groups of the remaining edges, ordered by smallest node.
        std::vector<std::size_t> group(g.adjacency.size());
        for (std::size_t i = 0; i < group.size(); ++i) group[i] = i;
        std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
            return group[i] == i ? i : group[i] = root(group[i]);
        };
        for (const auto& [a, b] : other) {
            const std::size_t ra = root(a), rb = root(b);
            if (ra != rb) group[std::max(ra, rb)] = std::min(ra, rb);
        }
        std::map<std::size_t, std::vector<Edge>> groups;
        for (const auto& e : other) groups[root(e.first)].push_back(e);
        std::size_t n = 0;
        for (auto& [r, edges] : groups) {
            std::set<std::size_t> members;
            for (const auto& [a, b] : edges) members.insert({a, b});
            out << "### Group " << ++n << "\n\n";
            std::stable_sort(edges.begin(), edges.end(),
                             [&](const Edge& x, const Edge& y) { return stronger(strength_of(g, x), strength_of(g, y)); });
            for (const auto& e : edges) {
                out << "- " << label(g, e.first) << " -> " << label(g, e.second) << " (strength "
                    << strength_text(strength_of(g, e)) << ")\n";
            }
            out << "\n";
        }
    }

    out << "## Data quality\n\n";
    out << "- Rows dropped for missing values: " << notes.dropped_rows << "\n";
    out << "- Columns removed before the search: ";
    if (notes.dropped_columns.empty()) {
        out << "none\n";
    } else {
        for (std::size_t k = 0; k < notes.dropped_columns.size(); ++k) out << (k ? ", " : "") << notes.dropped_columns[k];
        out << "\n";
    }
    out << "- Constant columns: ";
    if (notes.constant_columns.empty()) {
        out << "none\n";
    } else {
        for (std::size_t k = 0; k < notes.constant_columns.size(); ++k) out << (k ? ", " : "") << notes.constant_columns[k];
        out << "\n";
    }
    for (const auto& [name, labels] : notes.category_labels) {
        out << "- " << name << " was integer-coded from " << labels.size() << " categories\n";
    }
    std::vector<std::string> ties, capped;
    for (const auto& [e, s] : strengths.entries) {
        if (s.tie_corrections) {
            ties.push_back(label(g, e.first) + " -> " + label(g, e.second) + ": " + std::to_string(s.tie_corrections));
        }
        if (s.degenerate) capped.push_back(label(g, e.first) + " -> " + label(g, e.second));
    }
    out << "- Entropy estimates with tied values (zero spacings floored):" << (ties.empty() ? " none" : "") << "\n";
    for (const auto& t : ties) out << "  - " << t << "\n";
    out << "- Strengths at the cap (near-identical entropies):" << (capped.empty() ? " none" : "") << "\n";
    for (const auto& c : capped) out << "  - " << c << "\n";
    out << "- Edges removed by the score refinement: " << metrics.refined_edges_removed << "\n";
    out << "- Edges removed by the strength threshold: " << metrics.pruned_edges << "\n";
    if (metrics.repaired) out << "- No acyclic graph was sampled; the result was repaired by deleting weak edges\n";
    return out.str();
}

}  // namespace causalrl::pipeline
