#ifndef CAUSALRL_NUMERIC_ADAM_HPP
#define CAUSALRL_NUMERIC_ADAM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "causalrl/numeric/matrix.hpp"

namespace causalrl::numeric {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Adam with bias correction. Moment buffers are allocated on the first step
// from the parameter shapes and must keep matching them afterwards.
class AdamState {
public:
    AdamState() = default;
    explicit AdamState(AdamConfig config) : config_(config) {}

    void step(std::span<Matrix* const> params, std::span<const Matrix> grads);

    std::uint64_t steps() const { return step_; }
    const AdamConfig& config() const { return config_; }
    const std::vector<Matrix>& first_moments() const { return m_; }
    const std::vector<Matrix>& second_moments() const { return v_; }

private:
    AdamConfig config_;
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
    std::uint64_t step_ = 0;
};

}  // namespace causalrl::numeric

#endif  // CAUSALRL_NUMERIC_ADAM_HPP
