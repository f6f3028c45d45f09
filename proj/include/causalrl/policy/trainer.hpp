#ifndef CAUSALRL_POLICY_TRAINER_HPP
#define CAUSALRL_POLICY_TRAINER_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "causalrl/data/dataset.hpp"
#include "causalrl/graph/adjacency.hpp"
#include "causalrl/numeric/adam.hpp"
#include "causalrl/policy/networks.hpp"
#include "causalrl/scoring/bic.hpp"
#include "causalrl/scoring/reward.hpp"

namespace causalrl::policy {

struct TrainerConfig {
    std::size_t iterations = 2000;
    std::size_t graphs_per_iteration = 32;  // B
    std::size_t batch_size = 64;            // s, capped at the sample count
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    std::size_t d_model = 64;
    std::size_t heads = 4;
    std::size_t layers = 2;
    std::size_t ff_width = 128;
    std::size_t decoder_hidden = 32;
    std::size_t critic_hidden = 32;
    bool positional_encoding = false;
    bool refine = true;  // greedy score-lowering edge deletion on the returned graph
    scoring::RewardConfig reward;
    std::uint64_t seed = 0;

    void validate() const;
};

struct IterationLog {
    std::size_t iteration = 0;
    double mean_reward = 0.0;
    double best_reward = 0.0;   // best acyclic reward so far (-inf before the first)
    double mean_h = 0.0;
    double cyclic_fraction = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double actor_loss = 0.0;
    double critic_loss = 0.0;
};

struct TrainState {
    double best_reward = -std::numeric_limits<double>::infinity();
    std::optional<graph::AdjacencyMatrix> best_graph;  // always acyclic
    // Fallback material for the repair path.
    double best_cyclic_reward = -std::numeric_limits<double>::infinity();
    std::optional<graph::AdjacencyMatrix> best_cyclic_graph;
    Matrix best_cyclic_probabilities;
    Matrix last_probabilities;  // sigmoid(logits) of the latest iteration
    std::vector<IterationLog> logs;
    std::size_t iterations_done = 0;
    bool repaired = false;
    std::size_t refined_edges_removed = 0;
};

// Encoder, decoder, critic and their optimisers.
struct PolicyNetworks {
    EncoderParams encoder;
    DecoderParams decoder;
    CriticParams critic;
    numeric::AdamState actor_opt;
    numeric::AdamState critic_opt;

    static PolicyNetworks init(const TrainerConfig& cfg, Rng& rng);
    std::vector<Matrix*> actor_parameters();
    std::vector<Matrix*> critic_parameters();
};

struct SampledGraph {
    graph::AdjacencyMatrix graph;
    double log_prob = 0.0;
};

// Independent Bernoulli(sigmoid(logit)) per off-diagonal entry.
SampledGraph sample_adjacency(const Matrix& logits, Rng& rng);
SampledGraph sample_adjacency(const Matrix& logits, std::uint64_t seed);

// Sum over off-diagonal entries of log sigmoid(g) or log(1 - sigmoid(g)).
double adjacency_log_prob(const Matrix& logits, const graph::AdjacencyMatrix& a);

// Surrogate actor loss -(1/B) sum_k advantage_k * log pi(A_k) on the tape.
Var actor_surrogate(Var logits, const std::vector<graph::AdjacencyMatrix>& samples,
                    const std::vector<double>& advantages);

// One iteration: draw a data batch, encode, sample B graphs, score them,
// update actor and critic once each and fold acyclic samples into the record.
IterationLog train_step(TrainState& state, PolicyNetworks& nets, const data::Dataset& ds,
                        const scoring::BicScorer& scorer, const TrainerConfig& cfg,
                        const scoring::RewardConfig& penalties, std::size_t iteration, Rng& rng);

struct TrainResult {
    graph::CausalGraph graph;
    graph::AdjacencyMatrix search_graph;  // before refinement
    TrainState state;
    double bic = 0.0;  // graph_bic of the returned graph
};

using IterationCallback = std::function<void(const IterationLog&)>;

// Full run with penalty annealing; returns the best acyclic graph seen, or a
// repaired version of the best cyclic one when no acyclic graph was sampled,
// then (with cfg.refine) drops edges while that lowers the score.
TrainResult train(const TrainerConfig& cfg, const data::Dataset& ds, const scoring::BicScorer& scorer,
                  const IterationCallback& on_iteration = {});

// Deletes the lowest-probability edges one at a time until the graph is a DAG.
graph::AdjacencyMatrix repair_to_dag(graph::AdjacencyMatrix g, const Matrix& probabilities);

}  // namespace causalrl::policy

#endif  // CAUSALRL_POLICY_TRAINER_HPP
