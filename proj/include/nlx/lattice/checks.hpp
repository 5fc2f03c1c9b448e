#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlx/core/tolerances.hpp"
#include "nlx/lattice/expectations.hpp"

namespace nlx::lattice {

/// |E_t(E_s(phi))(node) - E_t(phi)(node)| for node at level t < s.
[[nodiscard]] double tower_residual(const ConditionalExpectation& e, int s, NodeId node, const Functional& phi);

/// Largest tower residual over every pair of levels t < s and every node at t.
[[nodiscard]] double max_tower_residual(const ConditionalExpectation& e, const Functional& phi);

struct StabilityReport {
    bool conditioning_stable = true;  // every positive-mass conditional lies in the later hull
    bool pasting_stable = true;       // every pasting of later vertices lies in the earlier hull
    double worst_distance = 0.0;      // L1 distance to the hull for the worst witness
    std::string witness;              // empty on success
    [[nodiscard]] bool pass() const noexcept { return conditioning_stable && pasting_stable; }
};

/// Checks stability under conditioning and pasting between levels t < s.
/// Pasting is checked on vertex kernels only; throws NumericRefusal when a node
/// has more than `max_kernels` of them.
[[nodiscard]] StabilityReport check_stability(const AmbiguitySet& set, int t, int s,
                                              const Tolerances& tol = default_tolerances(),
                                              std::size_t max_kernels = 1u << 16);

/// All pairs t < s.
[[nodiscard]] StabilityReport check_stability(const AmbiguitySet& set, const Tolerances& tol = default_tolerances());

struct MarginalReport {
    double cylinder_gap = 0.0;  // max |E1 - E2| over cylinder indicators (and negatives)
    double random_gap = 0.0;    // max |E1 - E2| over random functionals
    std::size_t cylinders_tested = 0;
    std::size_t randoms_tested = 0;
    std::optional<Functional> witness;  // a cylinder functional that separates, if any
    std::optional<NodeId> witness_node;
    /// The implication "agree on cylinders => agree everywhere" was not contradicted.
    [[nodiscard]] bool consistent(double tol) const noexcept { return cylinder_gap > tol || random_gap <= tol; }
    [[nodiscard]] bool agree(double tol) const noexcept { return cylinder_gap <= tol && random_gap <= tol; }
};

/// Compares two expectations on the same tree at every node of `level`:
/// first on indicators of {X_{k1} = a1, ..., X_{kn} = an} for every nonempty
/// set of levels, then on `num_random` uniform functionals in [-1, 1].
[[nodiscard]] MarginalReport marginal_uniqueness_check(const ConditionalExpectation& e1,
                                                       const ConditionalExpectation& e2, int level,
                                                       std::uint64_t seed, std::size_t num_random = 1000);

/// Cylinder indicators of every coordinate set, in a fixed order.
[[nodiscard]] std::vector<Functional> cylinder_indicators(const ScenarioTree& tree);

/// max over nodes n at level k >= shift - 1 of |E_k(phi)(n) - E_{k-shift}(phi o shift)(n')|,
/// where n' carries the last k - shift + 1 states of n and the shifted
/// functional prepends the first `shift` states of n to its argument.
/// Throws InvalidInput when the shift leaves the window.
[[nodiscard]] double shift_homogeneity_residual(const ConditionalExpectation& e, int shift, const Functional& phi);

/// One-step transition vertices for an internal node (root or level < steps - 1):
/// each inner vector is a distribution over the next state.
using StepVertices = std::function<std::vector<std::vector<double>>(NodeId)>;

/// Rectangular (product-form) ambiguity: at node n the members are all measures
/// whose transition at each internal descendant is a vertex of that node's set.
/// Such families are stable under conditioning and pasting.
[[nodiscard]] AmbiguitySet rectangular_ambiguity(const ScenarioTree& tree, const StepVertices& vertices,
                                                 std::size_t max_members = 1u << 14);

/// Product measure from per-node transition choices (by slot) below `node`;
/// `step` returns the distribution used at an internal node.
[[nodiscard]] PathMeasure product_measure(const ScenarioTree& tree, NodeId node,
                                          const std::function<const std::vector<double>&(NodeId)>& step);

/// Same hulls, longer vertex lists: each node also gets the midpoints of
/// consecutive members.
[[nodiscard]] AmbiguitySet with_midpoints(const AmbiguitySet& set);

/// Replaces the members at `node` by centroid + factor (P - centroid); for
/// factor < 1 and a node with two or more distinct members the hull shrinks.
[[nodiscard]] AmbiguitySet shrink_members(const AmbiguitySet& set, NodeId node, double factor);

}  // namespace nlx::lattice
