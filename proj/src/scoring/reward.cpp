#include "causalrl/scoring/reward.hpp"

#include <algorithm>
#include <cmath>

#include "causalrl/errors.hpp"

namespace causalrl::scoring {

void RewardConfig::validate() const {
    if (!(lambda1 >= 0.0 && lambda2 >= 0.0)) throw ValidationError("reward: lambda1, lambda2 must be >= 0");
    if (!(growth >= 1.0)) throw ValidationError("reward: growth factor must be >= 1");
    if (interval == 0) throw ValidationError("reward: annealing interval must be >= 1");
    if (lambda1_cap < lambda1) throw ValidationError("reward: lambda1 cap below initial value");
    if (lambda2_cap < lambda2) throw ValidationError("reward: lambda2 cap below initial value");
}

RewardBreakdown reward(const BicScorer& scorer, const RewardConfig& cfg, const graph::AdjacencyMatrix& a) {
    RewardBreakdown out;
    out.bic = scorer.graph_bic(a);
    out.acyclic = graph::is_dag(a);
    if (!out.acyclic) {
        out.indicator_term = cfg.lambda1;
        out.h = graph::acyclicity_penalty(a);
        out.h_term = cfg.lambda2 * out.h;
    }
    out.reward = -(out.bic + out.indicator_term + out.h_term);
    return out;
}

double bic_range_estimate(const BicScorer& scorer) {
    const std::size_t d = scorer.variables();
    graph::AdjacencyMatrix empty(d), full(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (i != j) full.set_edge(i, j);
    return std::abs(scorer.graph_bic(empty) - scorer.graph_bic(full));
}

LambdaSchedule::LambdaSchedule(const RewardConfig& cfg, double bic_range) : current_(cfg) {
    cfg.validate();
    if (cfg.relative) {
        if (!(bic_range >= 0.0) || !std::isfinite(bic_range)) throw UsageError("lambda schedule: BIC range must be finite");
        current_.lambda1 *= bic_range;
        current_.lambda2 *= bic_range;
        current_.lambda1_cap *= bic_range;
        current_.lambda2_cap *= bic_range;
        current_.relative = false;
    }
}

void LambdaSchedule::on_iteration(std::size_t completed) {
    if (completed == 0 || completed % current_.interval != 0) return;
    current_.lambda1 = std::min(current_.lambda1 * current_.growth, current_.lambda1_cap);
    current_.lambda2 = std::min(current_.lambda2 * current_.growth, current_.lambda2_cap);
}

}  // namespace causalrl::scoring
