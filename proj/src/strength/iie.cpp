#include "causalrl/strength/iie.hpp"

#include <cmath>
#include <vector>

#include "causalrl/errors.hpp"

namespace causalrl::strength {

namespace {

std::vector<double> zscore(const std::vector<double>& col) {
    const double n = static_cast<double>(col.size());
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    std::vector<double> out(col.size(), 0.0);
    if (ss == 0.0) return out;
    const double sd = std::sqrt(ss / (n - 1.0));
    for (std::size_t i = 0; i < col.size(); ++i) out[i] = (col[i] - mean) / sd;
    return out;
}

}  // namespace

IieStrength iie_strength(std::span<const double> x_cause, std::span<const double> x_effect) {
    IieStrength out;
    out.cause = spacing_entropy(x_cause);
    out.effect = spacing_entropy(x_effect);
    double gap = std::abs(out.effect.value - out.cause.value);
    if (gap < kEntropyGapFloor) {
        gap = kEntropyGapFloor;
        out.degenerate = true;
    }
    out.value = 1.0 / gap;
    return out;
}

IieStrength iie_strength_normalized(const data::Dataset& ds, std::size_t i, std::size_t j) {
    if (i >= ds.cols() || j >= ds.cols()) throw UsageError("iie_strength_normalized: column index out of range");
    const auto x = zscore(ds.numeric_column(i));
    const auto y = zscore(ds.numeric_column(j));
    return iie_strength(x, y);
}

double StrengthMatrix::log_strength(std::size_t from, std::size_t to) const {
    auto it = entries.find({from, to});
    return it == entries.end() ? std::numeric_limits<double>::quiet_NaN() : it->second.log_strength;
}

StrengthMatrix edge_strengths(const graph::AdjacencyMatrix& g, const data::Dataset& ds) {
    if (g.size() != ds.cols()) {
        throw ShapeError("edge_strengths: graph has " + std::to_string(g.size()) + " nodes, data has " +
                         std::to_string(ds.cols()) + " columns");
    }
    StrengthMatrix out;
    out.d = g.size();
    for (const auto& [from, to] : g.edges()) {
        const auto s = iie_strength_normalized(ds, from, to);
        out.entries[{from, to}] = EdgeStrength{std::log(s.value), s.value, s.degenerate,
                                               s.cause.tie_corrections + s.effect.tie_corrections};
    }
    return out;
}

graph::CausalGraph prune(const graph::CausalGraph& g, const StrengthMatrix& strengths, double threshold) {
    graph::CausalGraph out;
    out.variables = g.variables;
    out.adjacency = graph::AdjacencyMatrix(g.adjacency.size());
    for (const auto& [from, to] : g.adjacency.edges()) {
        auto it = strengths.entries.find({from, to});
        if (it == strengths.entries.end()) {
            throw UsageError("prune: no strength for edge " + std::to_string(from) + "->" + std::to_string(to));
        }
        if (it->second.log_strength < threshold) continue;
        out.adjacency.set_edge(from, to);
        out.strengths[{from, to}] = it->second.log_strength;
    }
    return out;
}

}  // namespace causalrl::strength
