#include "causalrl/graph/adjacency.hpp"

#include <algorithm>
#include <cmath>

#include "causalrl/errors.hpp"

namespace causalrl::graph {

AdjacencyMatrix::AdjacencyMatrix(std::size_t d, const std::vector<Edge>& edges) : AdjacencyMatrix(d) {
    for (const auto& [from, to] : edges) set_edge(from, to);
}

AdjacencyMatrix AdjacencyMatrix::from_matrix(const numeric::Matrix& m) {
    if (m.rows() != m.cols()) throw ShapeError("adjacency must be square, got " + m.shape_string());
    AdjacencyMatrix a(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) != 0.0) a.set_edge(i, j);
    return a;
}

void AdjacencyMatrix::check_index(std::size_t i) const {
    if (i >= d_) throw UsageError("node index " + std::to_string(i) + " out of range for d=" + std::to_string(d_));
}

void AdjacencyMatrix::set_edge(std::size_t from, std::size_t to, bool present) {
    check_index(from);
    check_index(to);
    if (from == to) {
        if (present) throw UsageError("self-loop on node " + std::to_string(from));
        return;
    }
    bits_[from * d_ + to] = present ? 1 : 0;
}

std::size_t AdjacencyMatrix::edge_count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<Edge> AdjacencyMatrix::edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < d_; ++i)
        for (std::size_t j = 0; j < d_; ++j)
            if (has_edge(i, j)) out.emplace_back(i, j);
    return out;
}

std::uint64_t AdjacencyMatrix::parent_mask(std::size_t child) const {
    check_index(child);
    if (d_ > 64) throw UsageError("parent_mask supports at most 64 nodes");
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < d_; ++i)
        if (has_edge(i, child)) mask |= std::uint64_t{1} << i;
    return mask;
}

numeric::Matrix AdjacencyMatrix::to_matrix() const {
    numeric::Matrix m(d_, d_);
    for (std::size_t i = 0; i < bits_.size(); ++i) m[i] = bits_[i];
    return m;
}

bool is_dag(const AdjacencyMatrix& a) {
    const std::size_t d = a.size();
    std::vector<std::size_t> indegree(d, 0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (a.has_edge(i, j)) ++indegree[j];
    std::vector<std::size_t> ready;
    for (std::size_t j = 0; j < d; ++j)
        if (indegree[j] == 0) ready.push_back(j);
    std::size_t peeled = 0;
    while (!ready.empty()) {
        const std::size_t i = ready.back();
        ready.pop_back();
        ++peeled;
        for (std::size_t j = 0; j < d; ++j)
            if (a.has_edge(i, j) && --indegree[j] == 0) ready.push_back(j);
    }
    return peeled == d;
}

double acyclicity_penalty(const AdjacencyMatrix& a) {
    // Sum_{k>=1} trace(A^k) / k!, carried as term = A^k / k! so entries stay bounded.
    // Nilpotent (DAG) matrices give exact zero traces at every order.
    const std::size_t d = a.size();
    if (d == 0) return 0.0;
    const numeric::Matrix base = a.to_matrix();
    numeric::Matrix term = base;
    double h = 0.0;
    for (std::size_t k = 1;; ++k) {
        if (k > 1) {
            term = numeric::matmul(term, base);
            const double inv_k = 1.0 / static_cast<double>(k);
            for (double& v : term.values()) v *= inv_k;
        }
        double tr = 0.0;
        for (std::size_t i = 0; i < d; ++i) tr += term(i, i);
        h += tr;
        double mx = 0.0;
        for (double v : term.values()) mx = std::max(mx, v);
        // Spectral radius is at most d - 1, so terms decay monotonically once k > d.
        if (mx == 0.0 || (k > d && mx * static_cast<double>(d) < 1e-17 * std::max(h, 1.0))) break;
        if (k > 100 * d + 200) break;
    }
    return h;
}

std::vector<std::size_t> parents(const AdjacencyMatrix& a, std::size_t node) {
    if (node >= a.size()) throw UsageError("parents: node " + std::to_string(node) + " out of range");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.has_edge(i, node)) out.push_back(i);
    return out;
}

std::vector<std::size_t> children(const AdjacencyMatrix& a, std::size_t node) {
    if (node >= a.size()) throw UsageError("children: node " + std::to_string(node) + " out of range");
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (a.has_edge(node, j)) out.push_back(j);
    return out;
}

std::vector<std::size_t> topological_order(const AdjacencyMatrix& a) {
    const std::size_t d = a.size();
    std::vector<std::size_t> indegree(d, 0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (a.has_edge(i, j)) ++indegree[j];
    std::vector<bool> done(d, false);
    std::vector<std::size_t> order;
    order.reserve(d);
    while (order.size() < d) {
        std::size_t next = d;
        for (std::size_t j = 0; j < d; ++j) {
            if (!done[j] && indegree[j] == 0) {
                next = j;
                break;
            }
        }
        if (next == d) throw UsageError("topological_order: graph has a directed cycle");
        done[next] = true;
        order.push_back(next);
        for (std::size_t j = 0; j < d; ++j)
            if (a.has_edge(next, j)) --indegree[j];
    }
    return order;
}

void CausalGraph::validate() const {
    if (variables.size() != adjacency.size()) {
        throw ValidationError("graph has " + std::to_string(adjacency.size()) + " nodes but " +
                              std::to_string(variables.size()) + " variables");
    }
    for (const auto& [edge, value] : strengths) {
        if (edge.first >= adjacency.size() || edge.second >= adjacency.size() ||
            !adjacency.has_edge(edge.first, edge.second)) {
            throw ValidationError("strength recorded for absent edge " + std::to_string(edge.first) + "->" +
                                  std::to_string(edge.second));
        }
    }
}

}  // namespace causalrl::graph
