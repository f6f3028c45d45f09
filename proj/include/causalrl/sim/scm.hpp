#ifndef CAUSALRL_SIM_SCM_HPP
#define CAUSALRL_SIM_SCM_HPP

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "causalrl/data/dataset.hpp"
#include "causalrl/graph/adjacency.hpp"

namespace causalrl::sim {

enum class MechanismKind { Linear, Quadratic };

std::string_view to_string(MechanismKind kind);
MechanismKind parse_mechanism_kind(std::string_view text);

// x_i = intercept + sum_p linear[p] * x_p + sum_p quadratic[p] * x_p^2 + noise.
struct Mechanism {
    std::vector<std::size_t> parents;
    std::vector<double> linear;
    std::vector<double> quadratic;  // empty for linear mechanisms
    double intercept = 0.0;
};

struct StructuralModel {
    graph::AdjacencyMatrix graph;
    std::vector<Mechanism> mechanisms;
    std::vector<double> noise_scales;  // per-node gaussian standard deviation

    std::size_t size() const { return graph.size(); }
    // Mechanisms reference exactly the graph parents with nonzero weights, scales > 0.
    void validate() const;
};

struct GeneratorConfig {
    std::size_t d = 4;
    double edge_probability = 0.4;
    MechanismKind mechanism = MechanismKind::Linear;
    double weight_min = 0.5;  // |w| is drawn from [weight_min, weight_max], random sign
    double weight_max = 2.0;
    double quadratic_scale = 0.25;  // quadratic weights are linear-style draws times this
    double noise_min = 0.5;
    double noise_max = 2.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Random node order, then each order-respecting edge independently with edge_probability.
graph::AdjacencyMatrix random_dag(const GeneratorConfig& cfg);

// random_dag plus random mechanisms and noise scales.
StructuralModel random_model(const GeneratorConfig& cfg);

// Ancestral sampling; variables are named x0..x{d-1}. Deterministic per seed.
data::Dataset generate(const StructuralModel& model, std::size_t m, std::uint64_t seed);

// Insertions + deletions + reversals; a reversed edge counts once.
std::size_t structural_hamming_distance(const graph::AdjacencyMatrix& a, const graph::AdjacencyMatrix& b);

}  // namespace causalrl::sim

#endif  // CAUSALRL_SIM_SCM_HPP
