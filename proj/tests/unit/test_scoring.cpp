#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "causalrl/data/preprocess.hpp"
#include "causalrl/errors.hpp"
#include "causalrl/scoring/bic.hpp"
#include "causalrl/scoring/reward.hpp"
#include "causalrl/sim/scm.hpp"
#include "causalrl/util/random.hpp"

using namespace causalrl;
using namespace causalrl::scoring;
using graph::AdjacencyMatrix;
using numeric::Matrix;

namespace {

data::Dataset matrix_dataset(const Matrix& x) {
    data::VariableTable vars;
    for (std::size_t j = 0; j < x.cols(); ++j) vars.push_back({"v" + std::to_string(j), data::VariableKind::Continuous, {}});
    return data::Dataset(vars, x);
}

Matrix noise_matrix(std::size_t m, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix x(m, d);
    for (double& v : x.values()) v = rng.normal();
    return x;
}

// Independent oracle: Householder QR least squares on the explicit design.
double qr_local_bic(const Matrix& x, std::size_t child, const std::vector<std::size_t>& parents) {
    const auto m = static_cast<Eigen::Index>(x.rows());
    Eigen::MatrixXd design(m, static_cast<Eigen::Index>(parents.size() + 1));
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        design(i, 0) = 1.0;
        for (std::size_t p = 0; p < parents.size(); ++p) design(i, static_cast<Eigen::Index>(p + 1)) = x(i, parents[p]);
        y(i) = x(i, child);
    }
    const Eigen::VectorXd beta = design.householderQr().solve(y);
    const double rss = (y - design * beta).squaredNorm();
    const double md = static_cast<double>(m);
    const double k = static_cast<double>(parents.size() + 2);
    return md * (std::log(2.0 * std::numbers::pi * rss / md) + 1.0) + k * std::log(md);
}

sim::StructuralModel chain_model() {
    sim::StructuralModel model;
    model.graph = AdjacencyMatrix(3, {{0, 1}, {1, 2}});
    model.mechanisms.resize(3);
    model.mechanisms[1] = {{0}, {1.2}, {}, 0.0};
    model.mechanisms[2] = {{1}, {-0.9}, {}, 0.0};
    model.noise_scales = {1.0, 0.6, 0.8};
    return model;
}

}  // namespace

TEST_CASE("local score of pure noise matches the closed form") {
    const std::size_t m = 10000;
    const Matrix x = noise_matrix(m, 1, 1);
    const BicScorer scorer(matrix_dataset(x));
    double mean = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += x(i, 0);
    mean /= m;
    for (std::size_t i = 0; i < m; ++i) ss += (x(i, 0) - mean) * (x(i, 0) - mean);
    const double md = static_cast<double>(m);
    const double exact = md * (std::log(2.0 * std::numbers::pi * ss / md) + 1.0) + 2.0 * std::log(md);
    CHECK(scorer.local_bic(0, std::uint64_t{0}) == doctest::Approx(exact).epsilon(1e-10));
    // With sigma^2 near 1 the score sits near m (ln 2 pi + 1) + 2 ln m; m ln(sigma^2) has sd about sqrt(2m).
    const double nominal = md * (std::log(2.0 * std::numbers::pi) + 1.0) + 2.0 * std::log(md);
    CHECK(std::abs(scorer.local_bic(0, std::uint64_t{0}) - nominal) < 4.0 * std::sqrt(2.0 * md));
}

TEST_CASE("local scores agree with an explicit least-squares fit") {
    Matrix x = noise_matrix(500, 4, 2);
    for (std::size_t i = 0; i < x.rows(); ++i) x(i, 3) += 0.8 * x(i, 0) - 0.5 * x(i, 2) + 3.0;
    const BicScorer scorer(matrix_dataset(x));
    for (const auto& parents : std::vector<std::vector<std::size_t>>{{}, {0}, {2}, {0, 2}, {0, 1, 2}}) {
        CHECK(scorer.local_bic(3, parents) == doctest::Approx(qr_local_bic(x, 3, parents)).epsilon(1e-9));
    }
    CHECK(scorer.local_bic(3, std::vector<std::size_t>{2, 0}) == scorer.local_bic(3, std::vector<std::size_t>{0, 2}));
    CHECK_THROWS_AS(scorer.local_bic(3, std::vector<std::size_t>{3}), UsageError);
    CHECK_THROWS_AS(scorer.local_bic(4, std::uint64_t{0}), UsageError);
}

TEST_CASE("a true parent lowers the score, an irrelevant one costs about ln m") {
    const auto ds = data::standardize(sim::generate(chain_model(), 5000, 3));
    const BicScorer scorer(ds);
    CHECK(scorer.local_bic(1, std::vector<std::size_t>{0}) < scorer.local_bic(1, std::vector<std::size_t>{}) - 1000.0);

    const std::size_t m = 10000;
    const BicScorer indep(matrix_dataset(noise_matrix(m, 2, 4)));
    const double diff = indep.local_bic(1, std::vector<std::size_t>{0}) - indep.local_bic(1, std::vector<std::size_t>{});
    // diff = ln m + m ln(1 - r^2), and m r^2 is roughly chi-squared with one degree of freedom.
    CHECK(diff <= std::log(static_cast<double>(m)) + 1e-9);
    CHECK(diff > std::log(static_cast<double>(m)) - 8.0);
}

TEST_CASE("collinear parents take the ridge path") {
    Matrix x = noise_matrix(200, 3, 5);
    for (std::size_t i = 0; i < x.rows(); ++i) x(i, 1) = 2.0 * x(i, 0);
    const BicScorer scorer(matrix_dataset(x));
    const double v = scorer.local_bic(2, std::vector<std::size_t>{0, 1});
    CHECK(std::isfinite(v));
    CHECK(scorer.singular_fits() >= 1);
    // Perfect fit floors the variance instead of producing -inf.
    CHECK(std::isfinite(scorer.local_bic(1, std::vector<std::size_t>{0})));
}

TEST_CASE("graph score properties") {
    const auto ds = data::standardize(sim::generate(chain_model(), 2000, 6));
    const BicScorer cached(ds);
    const BicScorer uncached(ds, ScorerOptions{RegressionKind::Linear, false});
    Rng rng(10);

    SUBCASE("cache on and off agree bit for bit") {
        for (int t = 0; t < 200; ++t) {
            AdjacencyMatrix a(3);
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j)
                    if (i != j && rng.bernoulli(0.5)) a.set_edge(i, j);
            CHECK(cached.graph_bic(a) == uncached.graph_bic(a));
        }
        CHECK(uncached.cache_size() == 0);
    }
    SUBCASE("changing one parent set changes only that term") {
        const BicScorer s(ds);
        const AdjacencyMatrix a(3, {{0, 1}, {1, 2}});
        AdjacencyMatrix b = a;
        b.set_edge(0, 2);
        const double before = s.graph_bic(a);
        const auto misses = s.cache_stats().misses;
        const double after = s.graph_bic(b);
        CHECK(s.cache_stats().misses == misses + 1);
        const double delta = s.local_bic(2, b.parent_mask(2)) - s.local_bic(2, a.parent_mask(2));
        CHECK(after - before == doctest::Approx(delta).epsilon(1e-12));
    }
    SUBCASE("true graph beats the empty graph") {
        CHECK(cached.graph_bic(AdjacencyMatrix(3, {{0, 1}, {1, 2}})) < cached.graph_bic(AdjacencyMatrix(3)));
    }
    SUBCASE("cyclic graphs are scored node by node") {
        const AdjacencyMatrix cyc(3, {{0, 1}, {1, 2}, {2, 0}});
        double sum = 0.0;
        for (std::size_t j = 0; j < 3; ++j) sum += cached.local_bic(j, cyc.parent_mask(j));
        CHECK(cached.graph_bic(cyc) == sum);
    }
}

TEST_CASE("graph score is invariant to relabelling") {
    sim::GeneratorConfig cfg;
    cfg.d = 5;
    cfg.seed = 21;
    const auto model = sim::random_model(cfg);
    const auto ds = sim::generate(model, 1000, 22);
    const Matrix& x = ds.samples();
    const std::vector<std::size_t> perm{3, 0, 4, 1, 2};  // new index k holds old perm[k]
    Matrix px(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < 5; ++k) px(i, k) = x(i, perm[k]);
    std::vector<std::size_t> inverse(5);
    for (std::size_t k = 0; k < 5; ++k) inverse[perm[k]] = k;

    const BicScorer original(ds);
    const BicScorer permuted(matrix_dataset(px));
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        AdjacencyMatrix a(5), pa(5);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j)
                if (i != j && rng.bernoulli(0.35)) {
                    a.set_edge(i, j);
                    pa.set_edge(inverse[i], inverse[j]);
                }
        CHECK(std::abs(original.graph_bic(a) - permuted.graph_bic(pa)) < 1e-9 * std::abs(original.graph_bic(a)) + 1e-9);
    }
}

TEST_CASE("quadratic features") {
    Rng rng(12);
    Matrix x(3000, 2);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = x(i, 0) * x(i, 0) + 0.3 * rng.normal();
    }
    const auto ds = matrix_dataset(x);
    const BicScorer lin(ds);
    const BicScorer quad(ds, ScorerOptions{RegressionKind::Quadratic});
    // x1 is uncorrelated with x0 but depends on it through x0^2.
    CHECK(quad.local_bic(1, std::vector<std::size_t>{0}) < quad.local_bic(1, std::vector<std::size_t>{}) - 1000.0);
    CHECK(lin.local_bic(1, std::vector<std::size_t>{0}) > lin.local_bic(1, std::vector<std::size_t>{}) - 20.0);
    CHECK(parse_regression_kind("quadratic") == RegressionKind::Quadratic);
}

TEST_CASE("reward") {
    const auto ds = data::standardize(sim::generate(chain_model(), 1000, 7));
    const BicScorer scorer(ds);
    RewardConfig cfg;
    cfg.lambda1 = 1.0;
    cfg.lambda2 = 1.0;

    const AdjacencyMatrix dag(3, {{0, 1}, {1, 2}});
    const auto r = reward(scorer, cfg, dag);
    CHECK(r.reward == -scorer.graph_bic(dag));
    CHECK(r.acyclic);
    CHECK(r.h == 0.0);

    const AdjacencyMatrix two(3, {{0, 1}, {1, 0}});
    const auto c = reward(scorer, cfg, two);
    CHECK_FALSE(c.acyclic);
    CHECK(c.indicator_term == 1.0);
    CHECK(c.h == doctest::Approx(2.0 * std::cosh(1.0) - 2.0).epsilon(1e-12));
    CHECK(std::abs(c.reward + scorer.graph_bic(two) + 1.0 + 1.0862) < 1e-4);

    RewardConfig heavier = cfg;
    heavier.lambda1 = 5.0;
    CHECK(reward(scorer, heavier, two).reward < c.reward);
    CHECK(reward(scorer, heavier, dag).reward == r.reward);
}

TEST_CASE("penalty schedule") {
    RewardConfig cfg;
    cfg.lambda1 = 0.25;
    cfg.lambda2 = 1e-2;
    cfg.lambda1_cap = 1.0;
    cfg.lambda2_cap = 0.03;
    cfg.growth = 2.0;
    cfg.interval = 10;

    LambdaSchedule relative(cfg, 400.0);
    CHECK(relative.current().lambda1 == 100.0);
    CHECK(relative.current().lambda2 == 4.0);
    CHECK_FALSE(relative.current().relative);
    relative.on_iteration(9);
    CHECK(relative.current().lambda1 == 100.0);
    relative.on_iteration(10);
    CHECK(relative.current().lambda1 == 200.0);
    CHECK(relative.current().lambda2 == 8.0);
    relative.on_iteration(20);
    relative.on_iteration(30);
    CHECK(relative.current().lambda1 == 400.0);  // capped at 1.0 * range
    CHECK(relative.current().lambda2 == doctest::Approx(12.0).epsilon(1e-15));

    cfg.relative = false;
    LambdaSchedule absolute(cfg, 400.0);
    CHECK(absolute.current().lambda1 == 0.25);
    CHECK_THROWS_AS(LambdaSchedule(RewardConfig{}, std::numeric_limits<double>::infinity()), UsageError);

    RewardConfig bad;
    bad.lambda1_cap = 0.5;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = RewardConfig{};
    bad.growth = 0.5;
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    const auto ds = data::standardize(sim::generate(chain_model(), 1000, 7));
    const BicScorer scorer(ds);
    AdjacencyMatrix full(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j) full.set_edge(i, j);
    CHECK(bic_range_estimate(scorer) == std::abs(scorer.graph_bic(AdjacencyMatrix(3)) - scorer.graph_bic(full)));
}

TEST_CASE("greedy edge removal") {
    const auto ds = data::standardize(sim::generate(chain_model(), 2000, 12));
    const BicScorer scorer(ds);
    const AdjacencyMatrix dense(3, {{0, 1}, {0, 2}, {1, 2}});
    CHECK(greedy_edge_removal(scorer, dense) == AdjacencyMatrix(3, {{0, 1}, {1, 2}}));

    sim::GeneratorConfig gen;
    gen.d = 6;
    gen.seed = 31;
    const auto model = sim::random_model(gen);
    const auto ds6 = data::standardize(sim::generate(model, 1500, 32));
    const BicScorer s6(ds6);
    Rng rng(33);
    for (int t = 0; t < 20; ++t) {
        // Random superset of a random order's DAG.
        AdjacencyMatrix a(6);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = i + 1; j < 6; ++j)
                if (rng.bernoulli(0.7)) a.set_edge(i, j);
        const auto out = greedy_edge_removal(s6, a);
        CHECK(s6.graph_bic(out) <= s6.graph_bic(a));
        for (const auto& [i, j] : out.edges()) {
            CHECK(a.has_edge(i, j));
            AdjacencyMatrix fewer = out;
            fewer.set_edge(i, j, false);
            CHECK(s6.graph_bic(fewer) >= s6.graph_bic(out));
        }
    }
    CHECK_THROWS_AS(greedy_edge_removal(scorer, AdjacencyMatrix(4)), UsageError);
}

TEST_CASE("exhaustive search") {
    CHECK(enumerate_dags(2).size() == 3);
    CHECK(enumerate_dags(3).size() == 25);
    CHECK(enumerate_dags(4).size() == 543);

    const BicScorer indep(matrix_dataset(noise_matrix(2000, 2, 8)));
    const auto e2 = exhaustive_best(indep, 2);
    CHECK(e2.graph == AdjacencyMatrix(2));
    CHECK(e2.dags_scored == 3);

    const BicScorer chain(data::standardize(sim::generate(chain_model(), 5000, 9)));
    const auto e3 = exhaustive_best(chain, 3);
    CHECK(graph::is_dag(e3.graph));
    CHECK(e3.dags_scored == 25);
    // Markov equivalence class of 0 - 1 - 2 without a collider: the skeleton
    // matches and 1 is not a common child of 0 and 2.
    CHECK(e3.graph.edge_count() == 2);
    CHECK((e3.graph.has_edge(0, 1) || e3.graph.has_edge(1, 0)));
    CHECK((e3.graph.has_edge(1, 2) || e3.graph.has_edge(2, 1)));
    CHECK_FALSE((e3.graph.has_edge(0, 1) && e3.graph.has_edge(2, 1)));
    for (const auto& g : enumerate_dags(3)) CHECK(chain.graph_bic(g) >= e3.bic);

    CHECK_THROWS_AS(exhaustive_best(chain, 5), UsageError);
}
