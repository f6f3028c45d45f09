#ifndef CAUSALRL_SCORING_REWARD_HPP
#define CAUSALRL_SCORING_REWARD_HPP

#include <cstddef>

#include "causalrl/graph/adjacency.hpp"
#include "causalrl/scoring/bic.hpp"

namespace causalrl::scoring {

// Penalty weights plus their annealing schedule. Every `interval` iterations
// both weights are multiplied by `growth` and clipped to their caps. With
// `relative` set, weights and caps are multiples of the BIC range estimate of
// the data being scored; otherwise they are used as given.
struct RewardConfig {
    double lambda1 = 1.0;
    double lambda2 = 1e-2;
    double growth = 2.0;
    std::size_t interval = 500;
    double lambda1_cap = 1.0;
    double lambda2_cap = 1.0;
    bool relative = true;

    void validate() const;
};

struct RewardBreakdown {
    double reward = 0.0;
    double bic = 0.0;
    double indicator_term = 0.0;  // lambda1 * I(not DAG)
    double h_term = 0.0;          // lambda2 * h(A)
    double h = 0.0;
    bool acyclic = true;
};

// reward = -(bic + lambda1 * I(G not a DAG) + lambda2 * h(A)), with the
// weights taken as absolute values.
RewardBreakdown reward(const BicScorer& scorer, const RewardConfig& cfg, const graph::AdjacencyMatrix& a);

// Spread of graph_bic between the empty graph and the complete (all off-diagonal
// edges) graph; the scale against which lambda1 is calibrated.
double bic_range_estimate(const BicScorer& scorer);

// Tracks the current penalty weights during training. current() is always in
// absolute units.
class LambdaSchedule {
public:
    LambdaSchedule(const RewardConfig& cfg, double bic_range);

    const RewardConfig& current() const { return current_; }

    // Call once per finished iteration (1-based count of completed iterations).
    void on_iteration(std::size_t completed);

private:
    RewardConfig current_;
};

}  // namespace causalrl::scoring

#endif  // CAUSALRL_SCORING_REWARD_HPP
