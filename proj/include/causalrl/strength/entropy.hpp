#ifndef CAUSALRL_STRENGTH_ENTROPY_HPP
#define CAUSALRL_STRENGTH_ENTROPY_HPP

#include <cstddef>
#include <span>

namespace causalrl::strength {

// Digamma function for x > 0: upward recurrence to x >= 6, then the
// asymptotic series. Throws DomainError for x <= 0.
double digamma(double x);

inline constexpr double kSpacingFloor = 1e-12;

struct EntropyEstimate {
    double value = 0.0;          // nats
    std::size_t n = 0;           // sample count
    std::size_t tie_corrections = 0;  // zero spacings floored at kSpacingFloor
};

// Differential entropy from first-order spacings of the sorted sample:
//   psi(n) - psi(1) + 1/(n-1) * sum_i log|x_(i+1) - x_(i)|.
// Requires n >= 2.
EntropyEstimate spacing_entropy(std::span<const double> sample);

}  // namespace causalrl::strength

#endif  // CAUSALRL_STRENGTH_ENTROPY_HPP
