#ifndef CAUSALRL_STRENGTH_IIE_HPP
#define CAUSALRL_STRENGTH_IIE_HPP

#include <cstddef>
#include <limits>
#include <map>
#include <span>

#include "causalrl/data/dataset.hpp"
#include "causalrl/graph/adjacency.hpp"
#include "causalrl/strength/entropy.hpp"

namespace causalrl::strength {

inline constexpr double kEntropyGapFloor = 1e-6;
inline constexpr double kStrengthCap = 1.0 / kEntropyGapFloor;
inline constexpr double kDefaultPruneThreshold = 0.1;

struct IieStrength {
    double value = 0.0;         // 1 / max(|S(y) - S(x)|, 1e-6)
    bool degenerate = false;    // gap hit the floor, value is the cap
    EntropyEstimate cause;
    EntropyEstimate effect;
};

// Inverse information entropy strength. Symmetric in its arguments.
IieStrength iie_strength(std::span<const double> x_cause, std::span<const double> x_effect);

// iie_strength on z-scored copies of columns i and j.
IieStrength iie_strength_normalized(const data::Dataset& ds, std::size_t i, std::size_t j);

struct EdgeStrength {
    double log_strength = 0.0;  // natural log of the normalised strength
    double raw = 0.0;
    bool degenerate = false;
    std::size_t tie_corrections = 0;  // cause + effect
};

// Strengths for the edges of one graph; entries exist only for its edges.
struct StrengthMatrix {
    std::size_t d = 0;
    std::map<graph::Edge, EdgeStrength> entries;

    bool contains(std::size_t from, std::size_t to) const { return entries.count({from, to}) != 0; }
    // NaN where there is no edge.
    double log_strength(std::size_t from, std::size_t to) const;
};

StrengthMatrix edge_strengths(const graph::AdjacencyMatrix& g, const data::Dataset& ds);

// Removes every edge whose log strength is below threshold. Strength entries
// for surviving edges are copied into the result's strength map.
graph::CausalGraph prune(const graph::CausalGraph& g, const StrengthMatrix& strengths,
                         double threshold = kDefaultPruneThreshold);

}  // namespace causalrl::strength

#endif  // CAUSALRL_STRENGTH_IIE_HPP
