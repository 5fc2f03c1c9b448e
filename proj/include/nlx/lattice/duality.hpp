#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nlx/core/tolerances.hpp"
#include "nlx/lattice/expectations.hpp"

namespace nlx::lattice {

/// KL(P || Q); +inf unless P << Q.
[[nodiscard]] double relative_entropy(const PathMeasure& p, const PathMeasure& q);

/// min over the simplex of |sum_i w_i v_i - p|_1, i.e. the L1 distance from p
/// to the convex hull of the vertices, solved as a linear program.
[[nodiscard]] double hull_distance(std::span<const PathMeasure> vertices, const PathMeasure& p);
[[nodiscard]] bool in_convex_hull(std::span<const PathMeasure> vertices, const PathMeasure& p, double tol = 1e-9);

// Convex conjugates  alpha(node, P) = sup_phi E^P[phi] - E_node(phi).

/// eps * KL(P || Q(.|node)); +inf if P charges leaves outside the node.
[[nodiscard]] double dual_penalty(const EntropicExpectation& e, NodeId node, const PathMeasure& p);
/// 0 if P lies in the convex hull of the node's members, +inf otherwise.
[[nodiscard]] double dual_penalty(const WorstCaseExpectation& e, NodeId node, const PathMeasure& p,
                                  const Tolerances& tol = default_tolerances());
/// Lower-semicontinuous convex minorant of the table at the node:
/// min { sum w_i alpha_i : sum w_i P_i = P, w in the simplex }.
[[nodiscard]] double dual_penalty(const PenaltyExpectation& e, NodeId node, const PathMeasure& p,
                                  const Tolerances& tol = default_tolerances());
/// 0 if P equals the prior's conditional at the node, +inf otherwise.
[[nodiscard]] double dual_penalty(const LinearExpectation& e, NodeId node, const PathMeasure& p,
                                  const Tolerances& tol = default_tolerances());

struct PenaltyLowerBound {
    double value = 0.0;          // certified: attained by `argument`
    std::vector<double> argument;
    int iterations = 0;
};

/// Projected supergradient ascent on phi -> E^P[phi] - E_node(phi) over the box
/// |phi| <= tol.subgradient_box with step 1/k. Works for any family; the
/// returned value never exceeds the true conjugate.
[[nodiscard]] PenaltyLowerBound dual_penalty_lower_bound(const ConditionalExpectation& e, NodeId node,
                                                         const PathMeasure& p,
                                                         const Tolerances& tol = default_tolerances());

struct DualPenalty {
    double value = 0.0;
    bool exact = true;  // false: certified lower bound from the generic search
};

/// Closed form for the built-in families, generic lower bound otherwise.
[[nodiscard]] DualPenalty dual_penalty(const ConditionalExpectation& e, NodeId node, const PathMeasure& p,
                                       const Tolerances& tol = default_tolerances());

/// sup over `candidates` of E^P[phi] - dual_penalty(e, node, P), skipping
/// infinite penalties. Returns -inf if every candidate is excluded.
[[nodiscard]] double reconstruct_expectation(const ConditionalExpectation& e, NodeId node, const Functional& phi,
                                             std::span<const PathMeasure> candidates,
                                             const Tolerances& tol = default_tolerances());

struct Separation {
    Functional functional;  // values in [-1, 1]
    double gap = 0.0;       // sup_A E[phi] - sup_B E[phi] > 0
    bool first_larger = true;
};

/// Looks for phi with sup over hull(a) != sup over hull(b) by linear programming:
/// for each vertex v of one set, maximize <phi, v> - max_q <phi, q> over the
/// other set's vertices. Returns nothing when the hulls coincide within tol.
[[nodiscard]] std::optional<Separation> separating_functional(std::span<const PathMeasure> a,
                                                              std::span<const PathMeasure> b, double tol = 1e-9);

}  // namespace nlx::lattice
