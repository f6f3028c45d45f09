#include "causalrl/sim/scm.hpp"

#include <numeric>

#include "causalrl/errors.hpp"
#include "causalrl/util/random.hpp"

namespace causalrl::sim {

namespace {

double signed_weight(Rng& rng, double lo, double hi) {
    const double mag = rng.uniform(lo, hi);
    return rng.bernoulli(0.5) ? mag : -mag;
}

}  // namespace

std::string_view to_string(MechanismKind kind) {
    return kind == MechanismKind::Linear ? "linear" : "quadratic";
}

MechanismKind parse_mechanism_kind(std::string_view text) {
    if (text == "linear") return MechanismKind::Linear;
    if (text == "quadratic") return MechanismKind::Quadratic;
    throw ValidationError("unknown mechanism '" + std::string(text) + "' (expected linear|quadratic)");
}

void GeneratorConfig::validate() const {
    if (d < 1) throw ValidationError("generator: d must be >= 1");
    if (!(edge_probability >= 0.0 && edge_probability <= 1.0)) {
        throw ValidationError("generator: edge probability must lie in [0, 1]");
    }
    if (!(weight_min >= 0.5 && weight_max >= weight_min)) {
        throw ValidationError("generator: weight range must satisfy 0.5 <= min <= max");
    }
    if (!(noise_min > 0.0 && noise_max >= noise_min)) {
        throw ValidationError("generator: noise range must satisfy 0 < min <= max");
    }
}

void StructuralModel::validate() const {
    const std::size_t d = graph.size();
    if (mechanisms.size() != d || noise_scales.size() != d) {
        throw ValidationError("structural model: need one mechanism and noise scale per node");
    }
    for (std::size_t i = 0; i < d; ++i) {
        const auto& mech = mechanisms[i];
        if (mech.parents != graph::parents(graph, i)) {
            throw ValidationError("structural model: mechanism of node " + std::to_string(i) +
                                  " does not match its graph parents");
        }
        if (mech.linear.size() != mech.parents.size() ||
            (!mech.quadratic.empty() && mech.quadratic.size() != mech.parents.size())) {
            throw ValidationError("structural model: weight count mismatch at node " + std::to_string(i));
        }
        for (std::size_t p = 0; p < mech.parents.size(); ++p) {
            const bool quad = !mech.quadratic.empty() && mech.quadratic[p] != 0.0;
            if (mech.linear[p] == 0.0 && !quad) {
                throw ValidationError("structural model: node " + std::to_string(i) + " is constant in parent " +
                                      std::to_string(mech.parents[p]));
            }
        }
        if (!(noise_scales[i] > 0.0)) {
            throw ValidationError("structural model: noise scale of node " + std::to_string(i) + " must be > 0");
        }
    }
    if (!graph::is_dag(graph)) throw ValidationError("structural model: graph is cyclic");
}

graph::AdjacencyMatrix random_dag(const GeneratorConfig& cfg) {
    cfg.validate();
    Rng rng(Rng::mix(cfg.seed, 0));
    std::vector<std::size_t> order(cfg.d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    graph::AdjacencyMatrix a(cfg.d);
    for (std::size_t p = 0; p < cfg.d; ++p)
        for (std::size_t q = p + 1; q < cfg.d; ++q)
            if (rng.uniform() < cfg.edge_probability) a.set_edge(order[p], order[q]);
    return a;
}

StructuralModel random_model(const GeneratorConfig& cfg) {
    StructuralModel model;
    model.graph = random_dag(cfg);
    Rng rng(Rng::mix(cfg.seed, 1));
    for (std::size_t i = 0; i < cfg.d; ++i) {
        Mechanism mech;
        mech.parents = graph::parents(model.graph, i);
        for (std::size_t p = 0; p < mech.parents.size(); ++p) {
            mech.linear.push_back(signed_weight(rng, cfg.weight_min, cfg.weight_max));
            if (cfg.mechanism == MechanismKind::Quadratic) {
                mech.quadratic.push_back(cfg.quadratic_scale * signed_weight(rng, cfg.weight_min, cfg.weight_max));
            }
        }
        model.mechanisms.push_back(std::move(mech));
        model.noise_scales.push_back(rng.uniform(cfg.noise_min, cfg.noise_max));
    }
    model.validate();
    return model;
}

data::Dataset generate(const StructuralModel& model, std::size_t m, std::uint64_t seed) {
    model.validate();
    if (m < 1) throw UsageError("generate: sample count must be >= 1");
    const std::size_t d = model.size();
    const auto order = graph::topological_order(model.graph);
    numeric::Matrix x(m, d);
    Rng rng(seed);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t node : order) {
            const auto& mech = model.mechanisms[node];
            double v = mech.intercept;
            for (std::size_t p = 0; p < mech.parents.size(); ++p) {
                const double xp = x(r, mech.parents[p]);
                v += mech.linear[p] * xp;
                if (!mech.quadratic.empty()) v += mech.quadratic[p] * xp * xp;
            }
            x(r, node) = v + model.noise_scales[node] * rng.normal();
        }
    }
    data::VariableTable vars;
    for (std::size_t i = 0; i < d; ++i) vars.push_back({"x" + std::to_string(i), data::VariableKind::Continuous, {}});
    return data::Dataset(std::move(vars), std::move(x));
}

std::size_t structural_hamming_distance(const graph::AdjacencyMatrix& a, const graph::AdjacencyMatrix& b) {
    if (a.size() != b.size()) {
        throw UsageError("structural_hamming_distance: d=" + std::to_string(a.size()) + " vs d=" +
                         std::to_string(b.size()));
    }
    std::size_t shd = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const bool same = a.has_edge(i, j) == b.has_edge(i, j) && a.has_edge(j, i) == b.has_edge(j, i);
            if (!same) ++shd;
        }
    }
    return shd;
}

}  // namespace causalrl::sim
