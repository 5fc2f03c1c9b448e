#pragma once

#include <random>

#include "nlx/lattice/checks.hpp"

namespace nlx::lattice {

using Rng = std::mt19937_64;

/// Dirichlet(1,...,1) weights on `range`, optionally zeroing some entries.
[[nodiscard]] PathMeasure random_measure(Rng& rng, std::size_t leaves, LeafRange range, double zero_probability = 0.0);
[[nodiscard]] Functional random_functional(Rng& rng, std::size_t leaves, double scale = 1.0);
/// 2 or 3 steps with 2 or 3 states (at most 27 leaves).
[[nodiscard]] ScenarioTree random_tree(Rng& rng);
/// Rectangular family with 1 to `max_vertices` random transitions per internal node.
[[nodiscard]] AmbiguitySet random_rectangular(Rng& rng, const ScenarioTree& tree, int max_vertices = 2);
/// Per-node sets of 1 to `max_members` random measures supported on the node;
/// not stable in general.
[[nodiscard]] AmbiguitySet random_ambiguity(Rng& rng, const ScenarioTree& tree, int max_members = 3);
/// Random catalogue with penalties in [0, 2], zero on one supported member
/// per node and +inf off the node's support.
[[nodiscard]] PenaltyTable random_penalty(Rng& rng, const ScenarioTree& tree, int per_node = 3);

}  // namespace nlx::lattice
