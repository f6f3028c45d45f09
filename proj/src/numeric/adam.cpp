#include "causalrl/numeric/adam.hpp"

#include <cmath>

#include "causalrl/errors.hpp"

namespace causalrl::numeric {

void AdamState::step(std::span<Matrix* const> params, std::span<const Matrix> grads) {
    if (params.size() != grads.size()) {
        throw ShapeError("adam: " + std::to_string(params.size()) + " parameters but " +
                         std::to_string(grads.size()) + " gradients");
    }
    if (m_.empty()) {
        for (const Matrix* p : params) {
            m_.push_back(Matrix::zeros_like(*p));
            v_.push_back(Matrix::zeros_like(*p));
        }
    }
    if (m_.size() != params.size()) throw ShapeError("adam: parameter count changed between steps");
    for (std::size_t k = 0; k < params.size(); ++k) {
        if (!params[k]->same_shape(grads[k]) || !params[k]->same_shape(m_[k])) {
            throw ShapeError("adam: shape mismatch for parameter " + std::to_string(k) + " (" +
                             params[k]->shape_string() + " vs grad " + grads[k].shape_string() + ")");
        }
    }

    ++step_;
    const auto t = static_cast<double>(step_);
    const double c1 = 1.0 - std::pow(config_.beta1, t);
    const double c2 = 1.0 - std::pow(config_.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        Matrix& p = *params[k];
        const Matrix& g = grads[k];
        Matrix& m = m_[k];
        Matrix& v = v_[k];
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
            v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
            const double mhat = m[i] / c1;
            const double vhat = v[i] / c2;
            p[i] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
        }
    }
}

}  // namespace causalrl::numeric
