#include "causalrl/policy/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "causalrl/errors.hpp"

namespace causalrl::policy {

namespace {

constexpr double kAdvantageEpsilon = 1e-8;

std::string describe_failure(const Matrix& logits, const std::vector<scoring::RewardBreakdown>& rewards,
                             double actor_loss, double critic_loss) {
    std::ostringstream os;
    os << "non-finite training loss (actor " << actor_loss << ", critic " << critic_loss << ")\n";
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        for (std::size_t j = 0; j < logits.cols(); ++j) {
            if (i == j) continue;
            const double v = logits(i, j);
            if (!std::isfinite(v)) ++bad;
            else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    os << "logits: min " << lo << " max " << hi << " non-finite " << bad << "\n";
    for (std::size_t k = 0; k < rewards.size(); ++k) {
        const auto& r = rewards[k];
        os << "sample " << k << ": reward " << r.reward << " bic " << r.bic << " indicator " << r.indicator_term
           << " h " << r.h << " h_term " << r.h_term << "\n";
    }
    return os.str();
}

}  // namespace

void TrainerConfig::validate() const {
    if (iterations == 0 || graphs_per_iteration == 0 || batch_size == 0) {
        throw ValidationError("trainer: iterations, graphs per iteration and batch size must be >= 1");
    }
    if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw ValidationError("trainer: learning rates must be > 0");
    if (decoder_hidden == 0 || critic_hidden == 0) throw ValidationError("trainer: hidden widths must be >= 1");
    EncoderConfig{batch_size, d_model, heads, layers, ff_width, positional_encoding}.validate();
    reward.validate();
}

PolicyNetworks PolicyNetworks::init(const TrainerConfig& cfg, Rng& rng) {
    PolicyNetworks n;
    EncoderConfig enc{cfg.batch_size, cfg.d_model, cfg.heads, cfg.layers, cfg.ff_width, cfg.positional_encoding};
    n.encoder = EncoderParams::init(enc, rng);
    n.decoder = DecoderParams::init(cfg.decoder_hidden, cfg.d_model, rng);
    n.critic = CriticParams::init(cfg.d_model, cfg.critic_hidden, rng);
    n.actor_opt = numeric::AdamState(numeric::AdamConfig{cfg.actor_lr});
    n.critic_opt = numeric::AdamState(numeric::AdamConfig{cfg.critic_lr});
    return n;
}

std::vector<Matrix*> PolicyNetworks::actor_parameters() {
    auto out = encoder.parameters();
    for (Matrix* m : decoder.parameters()) out.push_back(m);
    return out;
}

std::vector<Matrix*> PolicyNetworks::critic_parameters() { return critic.parameters(); }

SampledGraph sample_adjacency(const Matrix& logits, Rng& rng) {
    if (logits.rows() != logits.cols()) throw ShapeError("sample_adjacency: logits must be square");
    const std::size_t d = logits.rows();
    SampledGraph out{graph::AdjacencyMatrix(d), 0.0};
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (i == j) continue;
            const double g = logits(i, j);
            const bool edge = rng.uniform() < numeric::sigmoid(g);
            if (edge) out.graph.set_edge(i, j);
            out.log_prob += edge ? numeric::log_sigmoid(g) : numeric::log_sigmoid(-g);
        }
    }
    return out;
}

SampledGraph sample_adjacency(const Matrix& logits, std::uint64_t seed) {
    Rng rng(seed);
    return sample_adjacency(logits, rng);
}

double adjacency_log_prob(const Matrix& logits, const graph::AdjacencyMatrix& a) {
    double lp = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (i != j) lp += a.has_edge(i, j) ? numeric::log_sigmoid(logits(i, j)) : numeric::log_sigmoid(-logits(i, j));
    return lp;
}

Var actor_surrogate(Var logits, const std::vector<graph::AdjacencyMatrix>& samples,
                    const std::vector<double>& advantages) {
    if (samples.empty() || samples.size() != advantages.size()) {
        throw UsageError("actor_surrogate: need one advantage per sample");
    }
    const double inv_b = 1.0 / static_cast<double>(samples.size());
    std::optional<Var> total;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        Var term = numeric::scale(numeric::bernoulli_log_prob(logits, samples[k].to_matrix()), -advantages[k] * inv_b);
        total = total ? numeric::add(*total, term) : term;
    }
    return *total;
}

IterationLog train_step(TrainState& state, PolicyNetworks& nets, const data::Dataset& ds,
                        const scoring::BicScorer& scorer, const TrainerConfig& cfg,
                        const scoring::RewardConfig& penalties, std::size_t iteration, Rng& rng) {
    const std::size_t s = nets.encoder.config.input_width;
    const Matrix batch = data::sample_batch(ds, s, Rng::mix(cfg.seed, 0x1000 + iteration));

    numeric::Tape tape;
    Binder actor_bind(tape, true);
    Var enc = encode(actor_bind, nets.encoder, tape.constant(batch));
    Var logits = decode_logits(actor_bind, nets.decoder, enc);
    const Matrix& logit_values = logits.value();

    const std::size_t d = logit_values.rows();
    Matrix probs(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) probs(i, j) = i == j ? 0.0 : numeric::sigmoid(logit_values(i, j));
    state.last_probabilities = probs;

    const std::size_t b = cfg.graphs_per_iteration;
    std::vector<graph::AdjacencyMatrix> samples;
    std::vector<scoring::RewardBreakdown> rewards;
    samples.reserve(b);
    rewards.reserve(b);
    for (std::size_t k = 0; k < b; ++k) {
        samples.push_back(sample_adjacency(logit_values, rng).graph);
        rewards.push_back(scoring::reward(scorer, penalties, samples.back()));
    }

    IterationLog log;
    log.iteration = iteration;
    log.lambda1 = penalties.lambda1;
    log.lambda2 = penalties.lambda2;
    double mean = 0.0;
    std::size_t cyclic = 0;
    for (const auto& r : rewards) {
        mean += r.reward;
        log.mean_h += r.h;
        if (!r.acyclic) ++cyclic;
    }
    mean /= static_cast<double>(b);
    log.mean_reward = mean;
    log.mean_h /= static_cast<double>(b);
    log.cyclic_fraction = static_cast<double>(cyclic) / static_cast<double>(b);
    double var = 0.0;
    for (const auto& r : rewards) var += (r.reward - mean) * (r.reward - mean);
    const double sd = std::sqrt(var / static_cast<double>(b));
    std::vector<double> standardized(b);
    for (std::size_t k = 0; k < b; ++k) standardized[k] = (rewards[k].reward - mean) / (sd + kAdvantageEpsilon);

    // The critic sees the encoder output as a constant: its loss trains only the critic.
    Binder critic_bind(tape, true);
    Var baseline = critic_value(critic_bind, nets.critic, tape.constant(enc.value()));
    const double baseline_value = baseline.value()(0, 0);
    std::vector<double> advantages(b);
    for (std::size_t k = 0; k < b; ++k) advantages[k] = standardized[k] - baseline_value;

    Var actor_loss = actor_surrogate(logits, samples, advantages);
    std::optional<Var> critic_sum;
    for (std::size_t k = 0; k < b; ++k) {
        Var diff = numeric::square(numeric::sub(baseline, tape.constant(Matrix(1, 1, standardized[k]))));
        critic_sum = critic_sum ? numeric::add(*critic_sum, diff) : diff;
    }
    Var critic_loss = numeric::scale(*critic_sum, 1.0 / static_cast<double>(b));
    log.actor_loss = actor_loss.value()(0, 0);
    log.critic_loss = critic_loss.value()(0, 0);
    if (!std::isfinite(log.actor_loss) || !std::isfinite(log.critic_loss)) {
        throw NumericalError(describe_failure(logit_values, rewards, log.actor_loss, log.critic_loss));
    }

    const auto grads = tape.backward(numeric::add(actor_loss, critic_loss));
    auto actor_params = nets.actor_parameters();
    auto critic_params = nets.critic_parameters();
    const auto actor_grads = actor_bind.gradients(grads, actor_params);
    const auto critic_grads = critic_bind.gradients(grads, critic_params);
    nets.actor_opt.step(actor_params, actor_grads);
    nets.critic_opt.step(critic_params, critic_grads);

    for (std::size_t k = 0; k < b; ++k) {
        const auto& r = rewards[k];
        if (r.acyclic) {
            if (r.reward > state.best_reward) {
                state.best_reward = r.reward;
                state.best_graph = samples[k];
            }
        } else if (r.reward > state.best_cyclic_reward) {
            state.best_cyclic_reward = r.reward;
            state.best_cyclic_graph = samples[k];
            state.best_cyclic_probabilities = probs;
        }
    }
    log.best_reward = state.best_reward;
    state.iterations_done = iteration + 1;
    state.logs.push_back(log);
    return log;
}

graph::AdjacencyMatrix repair_to_dag(graph::AdjacencyMatrix g, const Matrix& probabilities) {
    while (!graph::is_dag(g)) {
        auto edges = g.edges();
        // Lowest probability first; ties by (from, to).
        auto weakest = std::min_element(edges.begin(), edges.end(), [&](const graph::Edge& a, const graph::Edge& b) {
            const double pa = probabilities(a.first, a.second);
            const double pb = probabilities(b.first, b.second);
            return pa != pb ? pa < pb : a < b;
        });
        g.set_edge(weakest->first, weakest->second, false);
    }
    return g;
}

TrainResult train(const TrainerConfig& cfg_in, const data::Dataset& ds, const scoring::BicScorer& scorer,
                  const IterationCallback& on_iteration) {
    TrainerConfig cfg = cfg_in;
    cfg.batch_size = std::min(cfg.batch_size, ds.rows());
    cfg.validate();
    if (ds.cols() < 2) throw UsageError("train: need at least 2 variables");
    if (scorer.variables() != ds.cols()) throw UsageError("train: scorer and dataset disagree on d");

    Rng init_rng(Rng::mix(cfg.seed, 1));
    PolicyNetworks nets = PolicyNetworks::init(cfg, init_rng);
    Rng sample_rng(Rng::mix(cfg.seed, 2));
    scoring::LambdaSchedule schedule(cfg.reward, scoring::bic_range_estimate(scorer));

    TrainResult result;
    TrainState& state = result.state;
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        const auto log = train_step(state, nets, ds, scorer, cfg, schedule.current(), it, sample_rng);
        if (on_iteration) on_iteration(log);
        schedule.on_iteration(it + 1);
    }

    graph::AdjacencyMatrix final_graph(ds.cols());
    if (state.best_graph) {
        final_graph = *state.best_graph;
    } else if (state.best_cyclic_graph) {
        final_graph = repair_to_dag(*state.best_cyclic_graph, state.best_cyclic_probabilities);
        state.repaired = true;
    }
    result.search_graph = final_graph;
    if (cfg.refine) {
        final_graph = scoring::greedy_edge_removal(scorer, final_graph);
        state.refined_edges_removed = result.search_graph.edge_count() - final_graph.edge_count();
    }
    result.graph.adjacency = final_graph;
    result.graph.variables = ds.variables();
    result.bic = scorer.graph_bic(final_graph);
    return result;
}

}  // namespace causalrl::policy
