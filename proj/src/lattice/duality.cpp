#include "nlx/lattice/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlx/core/errors.hpp"
#include "nlx/core/linprog.hpp"
#include "nlx/lattice/pasting.hpp"

namespace nlx::lattice {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// P - Q restricted to nothing; used to test P(.|node) support.
bool outside_node(const ScenarioTree& tree, NodeId node, const PathMeasure& p, double tol) {
    if (p.size() != tree.num_leaves()) throw InvalidInput("measure does not match the tree");
    return !p.supported_on(tree.leaves(node), tol);
}

}  // namespace

double relative_entropy(const PathMeasure& p, const PathMeasure& q) {
    if (p.size() != q.size()) throw InvalidInput("measure dimensions differ");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return kInf;
        kl += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(kl, 0.0);
}

double hull_distance(std::span<const PathMeasure> vertices, const PathMeasure& p) {
    if (vertices.empty()) throw InvalidInput("convex hull of an empty set");
    const std::size_t k = vertices.size();
    const std::size_t n = p.size();
    for (const auto& v : vertices)
        if (v.size() != n) throw InvalidInput("measure dimensions differ");
    // A vertex of the set is in its hull; stability checks hit this case most.
    for (const auto& v : vertices) {
        double d = 0.0;
        for (std::size_t leaf = 0; leaf < n; ++leaf) d += std::abs(v[leaf] - p[leaf]);
        if (d <= 1e-14) return d;
    }
    // Variables: w (k), s_plus (n), s_minus (n).
    lp::Problem prob;
    prob.cost.assign(k + 2 * n, 0.0);
    for (std::size_t j = k; j < k + 2 * n; ++j) prob.cost[j] = 1.0;
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        std::vector<double> row(k + 2 * n, 0.0);
        for (std::size_t i = 0; i < k; ++i) row[i] = vertices[i][leaf];
        row[k + leaf] = 1.0;
        row[k + n + leaf] = -1.0;
        prob.a_eq.push_back(std::move(row));
        prob.b_eq.push_back(p[leaf]);
    }
    std::vector<double> sum(k + 2 * n, 0.0);
    for (std::size_t i = 0; i < k; ++i) sum[i] = 1.0;
    prob.a_eq.push_back(std::move(sum));
    prob.b_eq.push_back(1.0);
    const lp::Result r = lp::minimize(prob, 1e-12);
    if (r.status != lp::Status::optimal) throw NumericRefusal("hull distance program did not solve");
    return std::max(r.objective, 0.0);
}

bool in_convex_hull(std::span<const PathMeasure> vertices, const PathMeasure& p, double tol) {
    return hull_distance(vertices, p) <= tol;
}

double dual_penalty(const EntropicExpectation& e, NodeId node, const PathMeasure& p) {
    if (outside_node(e.tree(), node, p, 0.0)) return kInf;
    return e.epsilon() * relative_entropy(p, conditional(e.tree(), e.prior(), node));
}

double dual_penalty(const WorstCaseExpectation& e, NodeId node, const PathMeasure& p, const Tolerances& tol) {
    if (outside_node(e.tree(), node, p, tol.hull)) return kInf;
    const auto members = e.set().member_measures(node);
    return in_convex_hull(members, p, tol.hull) ? 0.0 : kInf;
}

double dual_penalty(const PenaltyExpectation& e, NodeId node, const PathMeasure& p, const Tolerances& tol) {
    if (outside_node(e.tree(), node, p, tol.hull)) return kInf;
    const auto& table = e.table();
    std::vector<std::size_t> finite;
    for (std::size_t m = 0; m < table.catalogue().size(); ++m)
        if (std::isfinite(table.at(node, m))) finite.push_back(m);
    if (finite.empty()) throw InvalidInput("every penalty is +inf at the node");
    std::vector<PathMeasure> vertices;
    for (std::size_t m : finite) vertices.push_back(table.catalogue()[m]);

    const std::size_t k = finite.size();
    const std::size_t n = p.size();
    // A small L1 residual absorbs rounding in the representation of P; it is
    // kept far below the roundtrip tolerance so it cannot lower the value
    // noticeably. Infeasible means P lies outside the hull: +inf.
    lp::Problem prob;
    prob.cost.assign(k + 2 * n, 0.0);
    for (std::size_t i = 0; i < k; ++i) prob.cost[i] = table.at(node, finite[i]);
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        std::vector<double> row(k + 2 * n, 0.0);
        for (std::size_t i = 0; i < k; ++i) row[i] = vertices[i][leaf];
        row[k + leaf] = 1.0;
        row[k + n + leaf] = -1.0;
        prob.a_eq.push_back(std::move(row));
        prob.b_eq.push_back(p[leaf]);
    }
    std::vector<double> sum(k + 2 * n, 0.0);
    for (std::size_t i = 0; i < k; ++i) sum[i] = 1.0;
    prob.a_eq.push_back(std::move(sum));
    prob.b_eq.push_back(1.0);
    std::vector<double> slack(k + 2 * n, 0.0);
    for (std::size_t j = k; j < k + 2 * n; ++j) slack[j] = 1.0;
    prob.a_ub.push_back(std::move(slack));
    prob.b_ub.push_back(1e-11);
    const lp::Result r = lp::minimize(prob, 1e-12);
    if (r.status == lp::Status::infeasible) return kInf;
    if (r.status != lp::Status::optimal) throw NumericRefusal("penalty envelope program did not solve");
    return std::max(r.objective, 0.0);
}

double dual_penalty(const LinearExpectation& e, NodeId node, const PathMeasure& p, const Tolerances& tol) {
    if (outside_node(e.tree(), node, p, tol.hull)) return kInf;
    const PathMeasure q = conditional(e.tree(), e.prior(), node);
    double dist = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) dist += std::abs(p[i] - q[i]);
    return dist <= tol.hull ? 0.0 : kInf;
}

PenaltyLowerBound dual_penalty_lower_bound(const ConditionalExpectation& e, NodeId node, const PathMeasure& p,
                                           const Tolerances& tol) {
    const auto& tree = e.tree();
    PenaltyLowerBound out;
    if (outside_node(tree, node, p, 0.0)) {
        out.value = kInf;
        return out;
    }
    const LeafRange range = tree.leaves(node);
    std::vector<double> phi(tree.num_leaves(), 0.0);
    out.argument = phi;
    out.value = -e.evaluate(node, Functional(phi));  // E^P[0] - E(0)
    for (int k = 1; k <= tol.subgradient_iterations; ++k) {
        const Functional f(phi);
        const PathMeasure q = e.active_measure(node, f);
        const double step = 1.0 / static_cast<double>(k);
        for (std::size_t leaf = range.begin; leaf < range.end; ++leaf)
            phi[leaf] = std::clamp(phi[leaf] + step * (p[leaf] - q[leaf]), -tol.subgradient_box, tol.subgradient_box);
        const Functional next(phi);
        const double value = expected_value(p, next) - e.evaluate(node, next);
        out.iterations = k;
        if (value > out.value) {
            out.value = value;
            out.argument = phi;
        }
    }
    return out;
}

DualPenalty dual_penalty(const ConditionalExpectation& e, NodeId node, const PathMeasure& p, const Tolerances& tol) {
    if (const auto* ent = dynamic_cast<const EntropicExpectation*>(&e)) return {dual_penalty(*ent, node, p), true};
    if (const auto* wc = dynamic_cast<const WorstCaseExpectation*>(&e)) return {dual_penalty(*wc, node, p, tol), true};
    if (const auto* pen = dynamic_cast<const PenaltyExpectation*>(&e)) return {dual_penalty(*pen, node, p, tol), true};
    if (const auto* lin = dynamic_cast<const LinearExpectation*>(&e)) return {dual_penalty(*lin, node, p, tol), true};
    return {dual_penalty_lower_bound(e, node, p, tol).value, false};
}

double reconstruct_expectation(const ConditionalExpectation& e, NodeId node, const Functional& phi,
                               std::span<const PathMeasure> candidates, const Tolerances& tol) {
    double best = -kInf;
    for (const auto& p : candidates) {
        const DualPenalty a = dual_penalty(e, node, p, tol);
        if (!std::isfinite(a.value)) continue;
        best = std::max(best, expected_value(p, phi) - a.value);
    }
    return best;
}

namespace {

// max over phi in [-1,1]^n of <phi, v> - max_j <phi, q_j>.
std::pair<double, std::vector<double>> separate_vertex(const PathMeasure& v, std::span<const PathMeasure> others) {
    const std::size_t n = v.size();
    // Variables: phi (n, bounded), s (free). Minimize -<phi,v> + s.
    lp::Problem prob;
    prob.cost.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prob.cost[i] = -v[i];
    prob.cost[n] = 1.0;
    prob.bounds.assign(n + 1, lp::Bound{-1.0, 1.0});
    prob.bounds[n] = lp::Bound{-lp::kInf, lp::kInf};
    for (const auto& q : others) {
        std::vector<double> row(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i] = q[i];
        row[n] = -1.0;
        prob.a_ub.push_back(std::move(row));
        prob.b_ub.push_back(0.0);
    }
    const lp::Result r = lp::minimize(prob, 1e-12);
    if (r.status != lp::Status::optimal) throw NumericRefusal("separation program did not solve");
    std::vector<double> phi(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(n));
    return {-r.objective, phi};
}

double sup_over(std::span<const PathMeasure> set, const Functional& phi) {
    double best = -kInf;
    for (const auto& q : set) best = std::max(best, expected_value(q, phi));
    return best;
}

}  // namespace

std::optional<Separation> separating_functional(std::span<const PathMeasure> a, std::span<const PathMeasure> b,
                                                double tol) {
    if (a.empty() || b.empty()) throw InvalidInput("separation needs two nonempty sets");
    std::optional<Separation> best;
    auto consider = [&](std::span<const PathMeasure> from, std::span<const PathMeasure> against, bool first) {
        for (const auto& v : from) {
            auto [gap, phi] = separate_vertex(v, against);
            if (!(gap > tol)) continue;
            Functional f(std::move(phi));
            const double measured = first ? sup_over(a, f) - sup_over(b, f) : sup_over(b, f) - sup_over(a, f);
            if (!best || measured > best->gap) best = Separation{f, measured, first};
        }
    };
    consider(a, b, true);
    consider(b, a, false);
    return best;
}

}  // namespace nlx::lattice
