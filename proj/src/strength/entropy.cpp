#include "causalrl/strength/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "causalrl/errors.hpp"

namespace causalrl::strength {

double digamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("digamma: argument must be positive and finite");
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli-number tail: -sum B_2k / (2k x^2k), k = 1..7.
    const double tail =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 -
                                inv2 * (1.0 / 240.0 -
                                        inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 * (1.0 / 12.0)))))));
    return acc + std::log(x) - 0.5 * inv - tail;
}

EntropyEstimate spacing_entropy(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 2) throw UsageError("spacing_entropy: need at least 2 samples, got " + std::to_string(n));
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    EntropyEstimate est;
    est.n = n;
    double log_sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double gap = std::abs(x[i + 1] - x[i]);
        if (gap < kSpacingFloor) {
            gap = kSpacingFloor;
            ++est.tie_corrections;
        }
        log_sum += std::log(gap);
    }
    est.value = digamma(static_cast<double>(n)) - digamma(1.0) + log_sum / static_cast<double>(n - 1);
    return est;
}

}  // namespace causalrl::strength
