#ifndef CAUSALRL_TESTS_GRADIENT_CASES_HPP
#define CAUSALRL_TESTS_GRADIENT_CASES_HPP

// Finite-difference probes shared by the unit and acceptance suites.

#include <functional>
#include <string>
#include <vector>

#include "causalrl/policy/networks.hpp"
#include "causalrl/policy/trainer.hpp"
#include "support/finite_diff.hpp"

namespace causalrl::testing {

struct GradientCase {
    std::string name;
    std::vector<Matrix> inputs;
    ScalarFn fn;
};

// One case per differentiable tape op, inputs drawn from [-2, 2].
inline std::vector<GradientCase> op_gradient_cases(std::uint64_t seed) {
    Rng rng(seed);
    auto probe = [&](std::size_t r, std::size_t c) { return random_matrix(r, c, rng); };
    const Matrix wa = probe(3, 4), wc = probe(1, 4), wd = probe(4, 4), wl = probe(3, 5);
    // The masked diagonal is a -1e9 constant; keep it out of the probe so the
    // central difference is not swamped by cancellation.
    Matrix wb = probe(3, 3);
    for (std::size_t i = 0; i < 3; ++i) wb(i, i) = 0.0;
    const Matrix sample{{0, 1, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, 1}, {0, 0, 1, 0}};

    using V = const std::vector<Var>&;
    return {
        {"transpose", {probe(4, 3)}, [=](Tape& t, V in) { return weighted_sum(t, numeric::transpose(in[0]), wa); }},
        {"add", {probe(3, 4), probe(3, 4)}, [=](Tape& t, V in) { return weighted_sum(t, numeric::add(in[0], in[1]), wa); }},
        {"sub", {probe(3, 4), probe(3, 4)}, [=](Tape& t, V in) { return weighted_sum(t, numeric::sub(in[0], in[1]), wa); }},
        {"mul", {probe(3, 4), probe(3, 4)}, [=](Tape& t, V in) { return weighted_sum(t, numeric::mul(in[0], in[1]), wa); }},
        {"scale", {probe(3, 4)}, [=](Tape& t, V in) { return weighted_sum(t, numeric::scale(in[0], -1.7), wa); }},
        {"add_row", {probe(3, 4), probe(1, 4)}, [=](Tape& t, V in) { return weighted_sum(t, numeric::add_row(in[0], in[1]), wa); }},
        {"tanh", {probe(3, 4)}, [=](Tape& t, V in) { return weighted_sum(t, numeric::tanh(in[0]), wa); }},
        {"sigmoid", {probe(3, 4)}, [=](Tape& t, V in) { return weighted_sum(t, numeric::sigmoid(in[0]), wa); }},
        {"relu", {probe(3, 4)}, [=](Tape& t, V in) { return weighted_sum(t, numeric::relu(in[0]), wa); }},
        {"square", {probe(3, 4)}, [=](Tape& t, V in) { return weighted_sum(t, numeric::square(in[0]), wa); }},
        {"softmax_rows", {probe(3, 4)}, [=](Tape& t, V in) { return weighted_sum(t, numeric::softmax_rows(in[0]), wa); }},
        {"layer_norm", {probe(3, 5), probe(1, 5), probe(1, 5)},
         [=](Tape& t, V in) { return weighted_sum(t, numeric::layer_norm(in[0], in[1], in[2]), wl); }},
        {"slice_cols", {probe(3, 6)}, [=](Tape& t, V in) { return weighted_sum(t, numeric::slice_cols(in[0], 1, 4), wa); }},
        {"concat_cols", {probe(3, 1), probe(3, 3)},
         [=](Tape& t, V in) { return weighted_sum(t, numeric::concat_cols({in[0], in[1]}), wa); }},
        {"mean_rows", {probe(5, 4)}, [=](Tape& t, V in) { return weighted_sum(t, numeric::mean_rows(in[0]), wc); }},
        {"sum", {probe(3, 4)}, [=](Tape& t, V in) { return numeric::scale(numeric::sum(numeric::mul(in[0], t.constant(wa))), 0.5); }},
        {"pairwise_tanh", {probe(3, 4), probe(3, 4), probe(4, 1)},
         [=](Tape& t, V in) { return weighted_sum(t, numeric::pairwise_tanh(in[0], in[1], in[2]), wb); }},
        {"bernoulli_log_prob", {probe(4, 4)}, [=](Tape&, V in) { return numeric::bernoulli_log_prob(in[0], sample); }},
        {"matmul chain", {probe(4, 4), probe(4, 4)},
         [=](Tape& t, V in) { return weighted_sum(t, numeric::tanh(numeric::matmul(in[0], in[1])), wd); }},
    };
}

// Central differences of f over every entry of every parameter matrix.
inline double parameter_fd_error(const std::vector<Matrix*>& params, const std::vector<Matrix>& analytic,
                                 const std::function<double()>& f, double step = 1e-5) {
    double diff = 0.0, na = 0.0, nn = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        Matrix& p = *params[k];
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double orig = p[i];
            p[i] = orig + step;
            const double up = f();
            p[i] = orig - step;
            const double down = f();
            p[i] = orig;
            const double num = (up - down) / (2.0 * step);
            diff += (num - analytic[k][i]) * (num - analytic[k][i]);
            na += analytic[k][i] * analytic[k][i];
            nn += num * num;
        }
    }
    return std::sqrt(diff) / std::max(std::sqrt(std::max(na, nn)), 1e-12);
}

// Relative error of the actor surrogate gradient over all encoder and decoder
// parameters, on a random 3-variable batch with random samples and advantages.
inline double actor_loss_fd_error(std::uint64_t seed) {
    using namespace policy;
    Rng rng(seed);
    EncoderConfig cfg{6, 8, 2, 1, 8, false};
    EncoderParams enc = EncoderParams::init(cfg, rng);
    DecoderParams dec = DecoderParams::init(4, 8, rng);
    const Matrix batch = random_matrix(3, 6, rng);
    std::vector<graph::AdjacencyMatrix> samples;
    std::vector<double> adv;
    for (int k = 0; k < 3; ++k) {
        graph::AdjacencyMatrix a(3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                if (i != j && rng.uniform() < 0.5) a.set_edge(i, j);
        samples.push_back(a);
        adv.push_back(rng.uniform(-1.5, 1.5));
    }

    auto loss_value = [&] {
        numeric::Tape tape;
        Binder bind(tape, false);
        return actor_surrogate(decode_logits(bind, dec, encode(bind, enc, tape.constant(batch))), samples, adv)
            .value()(0, 0);
    };

    numeric::Tape tape;
    Binder bind(tape, true);
    Var loss = actor_surrogate(decode_logits(bind, dec, encode(bind, enc, tape.constant(batch))), samples, adv);
    const auto grads = tape.backward(loss);
    std::vector<Matrix*> params = enc.parameters();
    for (Matrix* m : dec.parameters()) params.push_back(m);
    const auto analytic = bind.gradients(grads, params);
    return parameter_fd_error(params, analytic, loss_value);
}

}  // namespace causalrl::testing

#endif  // CAUSALRL_TESTS_GRADIENT_CASES_HPP
