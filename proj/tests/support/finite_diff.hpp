#ifndef CAUSALRL_TESTS_FINITE_DIFF_HPP
#define CAUSALRL_TESTS_FINITE_DIFF_HPP

// Central finite-difference oracle for tape gradients. Independent of the
// backward pass: it only ever evaluates the forward function.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "causalrl/numeric/tape.hpp"
#include "causalrl/util/random.hpp"

namespace causalrl::testing {

using numeric::Matrix;
using numeric::Tape;
using numeric::Var;

using ScalarFn = std::function<Var(Tape&, const std::vector<Var>&)>;

inline double evaluate(const ScalarFn& f, const std::vector<Matrix>& inputs) {
    Tape tape;
    std::vector<Var> vars;
    for (const auto& m : inputs) vars.push_back(tape.parameter(m));
    return f(tape, vars).value()(0, 0);
}

inline std::vector<Matrix> analytic_gradients(const ScalarFn& f, const std::vector<Matrix>& inputs) {
    Tape tape;
    std::vector<Var> vars;
    for (const auto& m : inputs) vars.push_back(tape.parameter(m));
    const auto grads = tape.backward(f(tape, vars));
    std::vector<Matrix> out;
    for (const Var& v : vars) out.push_back(grads.of(v));
    return out;
}

inline std::vector<Matrix> numeric_gradients(const ScalarFn& f, std::vector<Matrix> inputs, double step = 1e-5) {
    std::vector<Matrix> out;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        Matrix g = Matrix::zeros_like(inputs[k]);
        for (std::size_t i = 0; i < inputs[k].size(); ++i) {
            const double orig = inputs[k][i];
            inputs[k][i] = orig + step;
            const double up = evaluate(f, inputs);
            inputs[k][i] = orig - step;
            const double down = evaluate(f, inputs);
            inputs[k][i] = orig;
            g[i] = (up - down) / (2.0 * step);
        }
        out.push_back(std::move(g));
    }
    return out;
}

// Norm-wise relative error ||a - n|| / max(||a||, ||n||), over all inputs jointly.
inline double gradient_relative_error(const ScalarFn& f, const std::vector<Matrix>& inputs, double step = 1e-5) {
    const auto a = analytic_gradients(f, inputs);
    const auto n = numeric_gradients(f, inputs, step);
    double diff = 0.0, na = 0.0, nn = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t i = 0; i < a[k].size(); ++i) {
            diff += (a[k][i] - n[k][i]) * (a[k][i] - n[k][i]);
            na += a[k][i] * a[k][i];
            nn += n[k][i] * n[k][i];
        }
    }
    const double denom = std::max(std::sqrt(std::max(na, nn)), 1e-12);
    return std::sqrt(diff) / denom;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -2.0, double hi = 2.0) {
    Matrix m(rows, cols);
    for (double& v : m.values()) v = rng.uniform(lo, hi);
    return m;
}

// Scalar probe sum(out .* weights) so every output entry carries a distinct weight.
inline Var weighted_sum(Tape& tape, Var out, const Matrix& weights) {
    return numeric::sum(numeric::mul(out, tape.constant(weights)));
}

}  // namespace causalrl::testing

#endif  // CAUSALRL_TESTS_FINITE_DIFF_HPP
