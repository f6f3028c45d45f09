#ifndef CAUSALRL_SCORING_BIC_HPP
#define CAUSALRL_SCORING_BIC_HPP

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <list>
#include <mutex>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "causalrl/data/dataset.hpp"
#include "causalrl/graph/adjacency.hpp"

namespace causalrl::scoring {

enum class RegressionKind { Linear, Quadratic };

std::string_view to_string(RegressionKind kind);
RegressionKind parse_regression_kind(std::string_view text);

inline constexpr double kRidge = 1e-8;
inline constexpr double kVarianceFloor = 1e-12;

struct ScorerOptions {
    RegressionKind kind = RegressionKind::Linear;
    bool cache_enabled = true;
    std::size_t cache_capacity = std::size_t{1} << 20;
};

struct CacheStats {
    std::size_t hits = 0;
    std::size_t misses = 0;
};

// Thread-safe LRU map from (child, parent mask) to a local score.
class LocalScoreCache {
public:
    explicit LocalScoreCache(std::size_t capacity) : capacity_(capacity) {}

    bool lookup(std::size_t child, std::uint64_t parents, double& out);
    void insert(std::size_t child, std::uint64_t parents, double value);
    std::size_t size() const;
    CacheStats stats() const;

private:
    using Key = std::pair<std::size_t, std::uint64_t>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept {
            return std::hash<std::uint64_t>{}(k.second * 0x9e3779b97f4a7c15ULL ^ k.first);
        }
    };

    std::size_t capacity_;
    mutable std::mutex mu_;
    std::list<Key> order_;  // most recent first
    std::unordered_map<Key, std::pair<double, std::list<Key>::iterator>, KeyHash> map_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

// Decomposable Gaussian BIC. Each node is an OLS regression on its parents
// (plus their squares for the quadratic kind) with an intercept:
//   local = m * (ln(2 pi sigma^2) + 1) + k * ln m,  sigma^2 = RSS / m,
// with k = design columns + 2 (intercept and variance). Lower is better.
// Fits use centred sufficient statistics precomputed once from the dataset.
class BicScorer {
public:
    explicit BicScorer(const data::Dataset& ds, ScorerOptions options = {});

    std::size_t variables() const { return d_; }
    std::size_t samples() const { return m_; }
    const ScorerOptions& options() const { return options_; }

    double local_bic(std::size_t child, std::uint64_t parent_mask) const;
    double local_bic(std::size_t child, const std::vector<std::size_t>& parent_set) const;

    // Sum of local terms; cyclic graphs are scored node by node all the same.
    double graph_bic(const graph::AdjacencyMatrix& a) const;

    CacheStats cache_stats() const { return cache_.stats(); }
    std::size_t cache_size() const { return cache_.size(); }
    // Fits that needed the ridge fallback.
    std::size_t singular_fits() const { return singular_fits_.load(); }

private:
    double fit(std::size_t child, std::uint64_t parent_mask) const;

    ScorerOptions options_;
    std::size_t d_ = 0;
    std::size_t m_ = 0;
    Eigen::MatrixXd cov_;  // feature covariance (1/m), features = columns [+ squared columns]
    mutable LocalScoreCache cache_;
    mutable std::atomic<std::size_t> singular_fits_{0};
};

// Minimiser of graph_bic over all DAGs on d <= 4 nodes (ties: first in enumeration order).
struct ExhaustiveResult {
    graph::AdjacencyMatrix graph;
    double bic = 0.0;
    std::size_t dags_scored = 0;
};
ExhaustiveResult exhaustive_best(const BicScorer& scorer, std::size_t d);

// Repeatedly deletes the single edge whose removal lowers graph_bic the most,
// until no deletion helps. Deleting edges keeps a DAG a DAG.
graph::AdjacencyMatrix greedy_edge_removal(const BicScorer& scorer, graph::AdjacencyMatrix a);

// Every DAG on d nodes, d <= 5.
std::vector<graph::AdjacencyMatrix> enumerate_dags(std::size_t d);

}  // namespace causalrl::scoring

#endif  // CAUSALRL_SCORING_BIC_HPP
