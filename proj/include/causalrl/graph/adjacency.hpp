#ifndef CAUSALRL_GRAPH_ADJACENCY_HPP
#define CAUSALRL_GRAPH_ADJACENCY_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "causalrl/data/variables.hpp"
#include "causalrl/numeric/matrix.hpp"

namespace causalrl::graph {

using Edge = std::pair<std::size_t, std::size_t>;

// Binary directed graph on d nodes. Entry (i, j) == 1 means the edge i -> j,
// i.e. i is a parent of j. Self-loops are never stored.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;
    explicit AdjacencyMatrix(std::size_t d) : d_(d), bits_(d * d, 0) {}
    AdjacencyMatrix(std::size_t d, const std::vector<Edge>& edges);

    // Any nonzero entry becomes an edge; the diagonal is ignored.
    static AdjacencyMatrix from_matrix(const numeric::Matrix& m);

    std::size_t size() const { return d_; }
    bool has_edge(std::size_t from, std::size_t to) const { return bits_[from * d_ + to] != 0; }
    void set_edge(std::size_t from, std::size_t to, bool present = true);
    std::size_t edge_count() const;
    // Sorted by (from, to).
    std::vector<Edge> edges() const;
    // Bitmask of parents of `child` (d <= 64).
    std::uint64_t parent_mask(std::size_t child) const;

    numeric::Matrix to_matrix() const;

    bool operator==(const AdjacencyMatrix&) const = default;
    bool operator<(const AdjacencyMatrix& o) const { return bits_ < o.bits_; }

private:
    void check_index(std::size_t i) const;

    std::size_t d_ = 0;
    std::vector<std::uint8_t> bits_;
};

// True iff there is no directed cycle (iterative in-degree peeling).
bool is_dag(const AdjacencyMatrix& a);

// h(A) = trace(exp(A)) - d. Zero exactly for DAGs, positive otherwise.
double acyclicity_penalty(const AdjacencyMatrix& a);

// Threshold below which a penalty value counts as "acyclic".
inline constexpr double kAcyclicTolerance = 1e-9;

std::vector<std::size_t> parents(const AdjacencyMatrix& a, std::size_t node);
std::vector<std::size_t> children(const AdjacencyMatrix& a, std::size_t node);

// Kahn's algorithm, smallest ready index first. Throws UsageError on cycles.
std::vector<std::size_t> topological_order(const AdjacencyMatrix& a);

// Learned graph plus optional per-edge (log) strengths, keyed by edge.
struct CausalGraph {
    AdjacencyMatrix adjacency;
    data::VariableTable variables;
    std::map<Edge, double> strengths;

    // Strength keys must be present edges; variable count must match.
    void validate() const;
};

}  // namespace causalrl::graph

#endif  // CAUSALRL_GRAPH_ADJACENCY_HPP
