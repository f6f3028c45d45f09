#include <doctest.h>

#include <cmath>
#include <functional>

#include "causalrl/errors.hpp"
#include "causalrl/graph/adjacency.hpp"
#include "causalrl/util/random.hpp"

using namespace causalrl;
using namespace causalrl::graph;

namespace {

// Independent oracle: depth-first search with colouring.
bool has_cycle_dfs(const AdjacencyMatrix& a) {
    const std::size_t d = a.size();
    std::vector<int> colour(d, 0);
    std::function<bool(std::size_t)> visit = [&](std::size_t u) {
        colour[u] = 1;
        for (std::size_t v = 0; v < d; ++v) {
            if (!a.has_edge(u, v)) continue;
            if (colour[v] == 1) return true;
            if (colour[v] == 0 && visit(v)) return true;
        }
        colour[u] = 2;
        return false;
    };
    for (std::size_t u = 0; u < d; ++u)
        if (colour[u] == 0 && visit(u)) return true;
    return false;
}

AdjacencyMatrix random_graph(std::size_t d, double p, Rng& rng) {
    AdjacencyMatrix a(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (i != j && rng.bernoulli(p)) a.set_edge(i, j);
    return a;
}

}  // namespace

TEST_CASE("adjacency basics") {
    AdjacencyMatrix a(3, {{0, 1}, {2, 1}});
    CHECK(a.edge_count() == 2);
    CHECK(a.has_edge(0, 1));
    CHECK_FALSE(a.has_edge(1, 0));
    CHECK(a.parent_mask(1) == 0b101);
    CHECK(parents(a, 1) == std::vector<std::size_t>{0, 2});
    CHECK(children(a, 0) == std::vector<std::size_t>{1});
    CHECK(a.edges() == std::vector<Edge>{{0, 1}, {2, 1}});
    CHECK_THROWS_AS(a.set_edge(1, 1), UsageError);
    CHECK_THROWS(a.set_edge(0, 3));
    CHECK(AdjacencyMatrix::from_matrix(a.to_matrix()) == a);
    CHECK(AdjacencyMatrix::from_matrix(numeric::Matrix{{5, 0.5}, {0, 0}}) == AdjacencyMatrix(2, {{0, 1}}));
}

TEST_CASE("penalty is zero exactly on DAGs over every 3-node graph") {
    const std::vector<Edge> slots{{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
    int dags = 0;
    for (unsigned bits = 0; bits < 64; ++bits) {
        AdjacencyMatrix a(3);
        for (std::size_t k = 0; k < 6; ++k)
            if (bits & (1u << k)) a.set_edge(slots[k].first, slots[k].second);
        const bool acyclic = !has_cycle_dfs(a);
        CAPTURE(bits);
        CHECK(is_dag(a) == acyclic);
        CHECK((acyclicity_penalty(a) <= kAcyclicTolerance) == acyclic);
        dags += acyclic;
    }
    CHECK(dags == 25);
}

TEST_CASE("penalty agrees with the peeling test on random graphs") {
    Rng rng(1234);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 2 + rng.below(5);
        const auto a = random_graph(d, rng.uniform(0.05, 0.6), rng);
        const double h = acyclicity_penalty(a);
        CHECK(h >= 0.0);
        CHECK(is_dag(a) == !has_cycle_dfs(a));
        CHECK((h <= kAcyclicTolerance) == is_dag(a));
    }
}

TEST_CASE("penalty closed forms") {
    // Two-cycle: trace(exp(A)) = 2 cosh(1).
    CHECK(acyclicity_penalty(AdjacencyMatrix(2, {{0, 1}, {1, 0}})) == doctest::Approx(2.0 * std::cosh(1.0) - 2.0).epsilon(1e-12));
    CHECK(acyclicity_penalty(AdjacencyMatrix(2, {{0, 1}, {1, 0}})) == doctest::Approx(1.0862).epsilon(1e-4));
    // Three-cycle: eigenvalues are the cube roots of unity.
    const double three = std::exp(1.0) + 2.0 * std::exp(-0.5) * std::cos(std::sqrt(3.0) / 2.0) - 3.0;
    CHECK(acyclicity_penalty(AdjacencyMatrix(3, {{0, 1}, {1, 2}, {2, 0}})) == doctest::Approx(three).epsilon(1e-12));
    CHECK(acyclicity_penalty(AdjacencyMatrix(4)) == 0.0);
    CHECK(acyclicity_penalty(AdjacencyMatrix(4, {{0, 1}, {1, 2}, {0, 3}, {2, 3}})) == 0.0);
}

TEST_CASE("adding an edge never lowers the penalty") {
    Rng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = 2 + rng.below(5);
        auto a = random_graph(d, 0.3, rng);
        const std::size_t i = rng.below(d);
        std::size_t j = rng.below(d);
        if (i == j) j = (j + 1) % d;
        const double before = acyclicity_penalty(a);
        a.set_edge(i, j);
        CHECK(acyclicity_penalty(a) >= before);
    }
}

TEST_CASE("topological order") {
    const AdjacencyMatrix a(5, {{3, 1}, {1, 0}, {4, 2}, {3, 2}});
    const auto order = topological_order(a);
    CHECK(order == std::vector<std::size_t>{3, 1, 0, 4, 2});
    std::vector<std::size_t> pos(5);
    for (std::size_t k = 0; k < 5; ++k) pos[order[k]] = k;
    for (const auto& [u, v] : a.edges()) CHECK(pos[u] < pos[v]);
    CHECK_THROWS_AS(topological_order(AdjacencyMatrix(3, {{0, 1}, {1, 2}, {2, 0}})), UsageError);
}

TEST_CASE("causal graph validation") {
    CausalGraph g;
    g.adjacency = AdjacencyMatrix(2, {{0, 1}});
    g.variables = data::VariableTable({{"a", data::VariableKind::Continuous, {}}, {"b", data::VariableKind::Continuous, {}}});
    g.strengths[{0, 1}] = 0.5;
    CHECK_NOTHROW(g.validate());
    g.strengths[{1, 0}] = 0.5;
    CHECK_THROWS(g.validate());
}
