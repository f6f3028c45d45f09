#include "causalrl/scoring/bic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <numbers>

#include "causalrl/errors.hpp"

namespace causalrl::scoring {

std::string_view to_string(RegressionKind kind) {
    return kind == RegressionKind::Linear ? "linear" : "quadratic";
}

RegressionKind parse_regression_kind(std::string_view text) {
    if (text == "linear") return RegressionKind::Linear;
    if (text == "quadratic") return RegressionKind::Quadratic;
    throw ValidationError("unknown regression kind '" + std::string(text) + "'");
}

bool LocalScoreCache::lookup(std::size_t child, std::uint64_t parents, double& out) {
    std::lock_guard lock(mu_);
    auto it = map_.find(Key{child, parents});
    if (it == map_.end()) {
        ++misses_;
        return false;
    }
    ++hits_;
    order_.splice(order_.begin(), order_, it->second.second);
    out = it->second.first;
    return true;
}

void LocalScoreCache::insert(std::size_t child, std::uint64_t parents, double value) {
    if (capacity_ == 0) return;
    std::lock_guard lock(mu_);
    const Key key{child, parents};
    if (auto it = map_.find(key); it != map_.end()) {
        it->second.first = value;
        order_.splice(order_.begin(), order_, it->second.second);
        return;
    }
    if (map_.size() >= capacity_) {
        map_.erase(order_.back());
        order_.pop_back();
    }
    order_.push_front(key);
    map_.emplace(key, std::make_pair(value, order_.begin()));
}

std::size_t LocalScoreCache::size() const {
    std::lock_guard lock(mu_);
    return map_.size();
}

CacheStats LocalScoreCache::stats() const {
    std::lock_guard lock(mu_);
    return CacheStats{hits_, misses_};
}

BicScorer::BicScorer(const data::Dataset& ds, ScorerOptions options)
    : options_(options), d_(ds.cols()), m_(ds.rows()), cache_(options.cache_capacity) {
    if (d_ == 0 || d_ > 64) throw UsageError("BicScorer: need 1..64 variables, got " + std::to_string(d_));
    if (m_ < 2) throw UsageError("BicScorer: need at least 2 samples");
    const auto& x = ds.samples();
    const std::size_t nf = options_.kind == RegressionKind::Quadratic ? 2 * d_ : d_;
    Eigen::MatrixXd f(m_, nf);
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t j = 0; j < d_; ++j) {
            f(i, j) = x(i, j);
            if (nf > d_) f(i, d_ + j) = x(i, j) * x(i, j);
        }
    }
    const Eigen::RowVectorXd mean = f.colwise().mean();
    f.rowwise() -= mean;
    cov_ = (f.transpose() * f) / static_cast<double>(m_);
}

double BicScorer::fit(std::size_t child, std::uint64_t parent_mask) const {
    std::vector<Eigen::Index> cols;
    for (std::size_t p = 0; p < d_; ++p) {
        if (parent_mask >> p & 1U) cols.push_back(static_cast<Eigen::Index>(p));
    }
    if (options_.kind == RegressionKind::Quadratic) {
        const std::size_t np = cols.size();
        for (std::size_t k = 0; k < np; ++k) cols.push_back(cols[k] + static_cast<Eigen::Index>(d_));
    }
    const auto c = static_cast<Eigen::Index>(child);
    double var = cov_(c, c);
    if (!cols.empty()) {
        const auto k = static_cast<Eigen::Index>(cols.size());
        Eigen::MatrixXd spp(k, k);
        Eigen::VectorXd spc(k);
        for (Eigen::Index a = 0; a < k; ++a) {
            spc(a) = cov_(cols[a], c);
            for (Eigen::Index b = 0; b < k; ++b) spp(a, b) = cov_(cols[a], cols[b]);
        }
        Eigen::LLT<Eigen::MatrixXd> llt(spp);
        bool singular = llt.info() != Eigen::Success;
        if (!singular) {
            const auto diag = llt.matrixLLT().diagonal();
            const double max_scale = spp.diagonal().maxCoeff();
            singular = diag.minCoeff() * diag.minCoeff() <= 1e-10 * std::max(max_scale, 1e-300);
        }
        Eigen::VectorXd beta;
        if (singular) {
            singular_fits_.fetch_add(1, std::memory_order_relaxed);
            spp.diagonal().array() += kRidge;
            beta = spp.ldlt().solve(spc);
        } else {
            beta = llt.solve(spc);
        }
        // Residual variance of the least-squares fit: S_cc - 2 b'S_pc + b'S_pp b,
        // which equals S_cc - b'S_pc at the exact solution.
        var = var - spc.dot(beta);
    }
    var = std::max(var, kVarianceFloor);
    const double m = static_cast<double>(m_);
    const double n_params = static_cast<double>(cols.size() + 2);
    return m * (std::log(2.0 * std::numbers::pi * var) + 1.0) + n_params * std::log(m);
}

double BicScorer::local_bic(std::size_t child, std::uint64_t parent_mask) const {
    if (child >= d_) throw UsageError("local_bic: child " + std::to_string(child) + " out of range");
    if (parent_mask >> child & 1U) throw UsageError("local_bic: child is in its own parent set");
    if (d_ < 64 && (parent_mask >> d_) != 0) throw UsageError("local_bic: parent index out of range");
    double value;
    if (options_.cache_enabled && cache_.lookup(child, parent_mask, value)) return value;
    value = fit(child, parent_mask);
    if (options_.cache_enabled) cache_.insert(child, parent_mask, value);
    return value;
}

double BicScorer::local_bic(std::size_t child, const std::vector<std::size_t>& parent_set) const {
    std::uint64_t mask = 0;
    for (std::size_t p : parent_set) {
        if (p >= d_) throw UsageError("local_bic: parent " + std::to_string(p) + " out of range");
        mask |= std::uint64_t{1} << p;
    }
    return local_bic(child, mask);
}

double BicScorer::graph_bic(const graph::AdjacencyMatrix& a) const {
    if (a.size() != d_) {
        throw ShapeError("graph_bic: graph has " + std::to_string(a.size()) + " nodes, data has " + std::to_string(d_));
    }
    double total = 0.0;
    for (std::size_t j = 0; j < d_; ++j) total += local_bic(j, a.parent_mask(j));
    return total;
}

std::vector<graph::AdjacencyMatrix> enumerate_dags(std::size_t d) {
    if (d > 5) throw UsageError("enumerate_dags: d=" + std::to_string(d) + " too large (max 5)");
    std::vector<graph::Edge> slots;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (i != j) slots.emplace_back(i, j);
    std::vector<graph::AdjacencyMatrix> out;
    const std::uint64_t total = std::uint64_t{1} << slots.size();
    for (std::uint64_t bits = 0; bits < total; ++bits) {
        graph::AdjacencyMatrix a(d);
        for (std::size_t s = 0; s < slots.size(); ++s)
            if (bits >> s & 1U) a.set_edge(slots[s].first, slots[s].second);
        if (graph::is_dag(a)) out.push_back(std::move(a));
    }
    return out;
}

ExhaustiveResult exhaustive_best(const BicScorer& scorer, std::size_t d) {
    if (d > 4) throw UsageError("exhaustive_best: d=" + std::to_string(d) + " exceeds 4");
    if (d != scorer.variables()) throw UsageError("exhaustive_best: d does not match the scorer");
    ExhaustiveResult best;
    bool first = true;
    for (auto& g : enumerate_dags(d)) {
        const double s = scorer.graph_bic(g);
        ++best.dags_scored;
        if (first || s < best.bic) {
            best.bic = s;
            best.graph = std::move(g);
            first = false;
        }
    }
    return best;
}

graph::AdjacencyMatrix greedy_edge_removal(const BicScorer& scorer, graph::AdjacencyMatrix a) {
    if (a.size() != scorer.variables()) throw UsageError("greedy_edge_removal: graph size does not match the scorer");
    std::vector<double> local(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) local[j] = scorer.local_bic(j, a.parent_mask(j));
    for (;;) {
        double best_gain = 0.0;
        std::optional<graph::Edge> best;
        for (const auto& [from, to] : a.edges()) {
            const double without = scorer.local_bic(to, a.parent_mask(to) & ~(std::uint64_t{1} << from));
            const double gain = local[to] - without;
            if (gain > best_gain) {
                best_gain = gain;
                best = graph::Edge{from, to};
            }
        }
        if (!best) return a;
        a.set_edge(best->first, best->second, false);
        local[best->second] = scorer.local_bic(best->second, a.parent_mask(best->second));
    }
}

}  // namespace causalrl::scoring
