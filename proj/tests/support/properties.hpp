#pragma once

// Randomized axiom checks shared by the unit suite and the acceptance gate.
// Each property runs `cases` independent draws and counts violations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "nlx/hjb/semigroup.hpp"
#include "nlx/lattice/expectations.hpp"
#include "nlx/lattice/measure.hpp"
#include "nlx/lattice/random.hpp"

namespace nlx::testing {

struct PropertyTally {
    std::string backend;
    std::string property;
    std::size_t cases = 0;
    std::size_t violations = 0;
    double worst = 0.0;  // largest excess over the tolerance-free inequality

    void observe(double excess, double tol) {
        ++cases;
        worst = std::max(worst, excess);
        if (!(excess <= tol)) ++violations;
    }
};

inline constexpr double kPropertyTol = 1e-12;

// One random conditional expectation on a random tree: entropic, worst-case,
// penalty-table or linear, cycling with the case index.
struct LatticeCase {
    std::unique_ptr<lattice::ConditionalExpectation> e;
    lattice::NodeId node;
    std::size_t leaves = 0;
};

inline LatticeCase lattice_case(lattice::Rng& rng, std::size_t index, bool homogeneous_only = false) {
    using namespace lattice;
    const ScenarioTree tree = random_tree(rng);
    const std::size_t n = tree.num_leaves();
    LatticeCase out;
    out.leaves = n;
    const std::size_t kind = homogeneous_only ? (index % 2 == 0 ? 1 : 3) : index % 4;
    switch (kind) {
        case 0: {
            std::uniform_real_distribution<double> eps(0.1, 3.0);
            out.e = std::make_unique<EntropicExpectation>(tree, random_measure(rng, n, {0, n}), eps(rng));
            break;
        }
        case 1:
            out.e = std::make_unique<WorstCaseExpectation>(random_ambiguity(rng, tree, 3));
            break;
        case 2:
            out.e = std::make_unique<PenaltyExpectation>(random_penalty(rng, tree, 3));
            break;
        default:
            out.e = std::make_unique<LinearExpectation>(tree, random_measure(rng, n, {0, n}, 0.2));
            break;
    }
    std::uniform_int_distribution<int> level(-1, tree.num_steps() - 1);
    const int k = level(rng);
    std::uniform_int_distribution<std::size_t> idx(0, tree.nodes_at(k) - 1);
    out.node = {k, idx(rng)};
    return out;
}

inline std::vector<PropertyTally> lattice_properties(std::uint64_t seed, std::size_t cases) {
    using namespace lattice;
    PropertyTally mono{"lattice", "monotonicity"}, convex{"lattice", "convexity"}, cash{"lattice", "cash additivity"},
        homog{"lattice", "positive homogeneity"}, constant{"lattice", "constants"};
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0), shift(-5.0, 5.0), scale(0.0, 4.0);
    for (std::size_t i = 0; i < cases; ++i) {
        auto c = lattice_case(rng, i);
        const auto& e = *c.e;
        const Functional phi = random_functional(rng, c.leaves, 2.0);
        const Functional psi = random_functional(rng, c.leaves, 2.0);
        const double e_phi = e.evaluate(c.node, phi);

        std::vector<double> up(phi.values().begin(), phi.values().end());
        for (auto& v : up) v += unit(rng) * (unit(rng) < 0.5 ? 0.0 : 1.0);
        mono.observe(e_phi - e.evaluate(c.node, Functional(up)), kPropertyTol);

        const double lambda = unit(rng);
        const double lhs = e.evaluate(c.node, mix(phi, psi, lambda));
        convex.observe(lhs - (lambda * e_phi + (1.0 - lambda) * e.evaluate(c.node, psi)), kPropertyTol);

        const double k = shift(rng);
        cash.observe(std::abs(e.evaluate(c.node, affine(phi, 1.0, k)) - e_phi - k), kPropertyTol);

        constant.observe(std::abs(e.evaluate(c.node, Functional::constant(c.leaves, k)) - k), kPropertyTol);
    }
    for (std::size_t i = 0; i < cases; ++i) {
        auto c = lattice_case(rng, i, true);
        const Functional phi = random_functional(rng, c.leaves, 2.0);
        const double s = scale(rng);
        const double scaled = c.e->evaluate(c.node, affine(phi, s, 0.0));
        const double expected = s * c.e->evaluate(c.node, phi);
        homog.observe(std::abs(scaled - expected) / std::max(1.0, std::abs(expected)), kPropertyTol);
    }
    return {mono, convex, cash, homog, constant};
}

// Random monotone semigroup: a G-heat band or a drift band with unit noise,
// on a short line so that each solve is cheap.
inline hjb::DiscreteHamiltonian hjb_case(lattice::Rng& rng, std::size_t index) {
    std::uniform_real_distribution<double> lo(0.2, 1.0), width(0.0, 1.5), drift(0.1, 1.5);
    const auto grid = hjb::SpatialGrid::line(-2.0, 2.0, 0.1);
    if (index % 2 == 0) {
        const double a = lo(rng);
        return {hjb::g_heat(a, a + width(rng), 5), grid};
    }
    const double m = drift(rng);
    hjb::HamiltonianSpec spec;
    spec.controls = hjb::sample_controls(-m, m, 5);
    spec.drift = [](const hjb::Point&, const hjb::Control& c) { return hjb::Point{c[0], 0.0}; };
    const double s = lo(rng);
    spec.volatility = [s](const hjb::Point&, const hjb::Control&) { return std::vector<double>{s}; };
    return {spec, grid};
}

inline hjb::ValueField random_field(lattice::Rng& rng, const hjb::SpatialGrid& grid, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    hjb::ValueField f{grid, std::vector<double>(grid.size()), 0.0};
    for (auto& v : f.values) v = u(rng);
    return f;
}

inline double sup_excess(const hjb::ValueField& a, const hjb::ValueField& b) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, a.values[i] - b.values[i]);
    return worst;
}

inline std::vector<PropertyTally> hjb_properties(std::uint64_t seed, std::size_t cases) {
    PropertyTally mono{"hjb", "monotonicity"}, convex{"hjb", "convexity"}, cash{"hjb", "cash additivity"},
        homog{"hjb", "positive homogeneity"}, constant{"hjb", "constants"};
    lattice::Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0), shift(-5.0, 5.0), scale(0.0, 4.0), dur(0.01, 0.05);
    for (std::size_t i = 0; i < cases; ++i) {
        const auto h = hjb_case(rng, i);
        const auto& grid = h.grid();
        const double t = dur(rng);
        const auto g = random_field(rng, grid, 2.0);
        const auto gp = random_field(rng, grid, 2.0);
        const auto tg = hjb::evolve(h, g, t);

        auto up = g;
        for (auto& v : up.values) v += unit(rng);
        mono.observe(sup_excess(tg, hjb::evolve(h, up, t)), kPropertyTol);

        const double lambda = unit(rng);
        auto mixed = g;
        for (std::size_t k = 0; k < mixed.values.size(); ++k)
            mixed.values[k] = lambda * g.values[k] + (1.0 - lambda) * gp.values[k];
        const auto tm = hjb::evolve(h, mixed, t);
        const auto tgp = hjb::evolve(h, gp, t);
        auto combo = tg;
        for (std::size_t k = 0; k < combo.values.size(); ++k)
            combo.values[k] = lambda * tg.values[k] + (1.0 - lambda) * tgp.values[k];
        convex.observe(sup_excess(tm, combo), kPropertyTol);

        const double c = shift(rng);
        auto shifted = g;
        for (auto& v : shifted.values) v += c;
        const auto ts = hjb::evolve(h, shifted, t);
        double cash_gap = 0.0;
        for (std::size_t k = 0; k < ts.values.size(); ++k)
            cash_gap = std::max(cash_gap, std::abs(ts.values[k] - tg.values[k] - c));
        cash.observe(cash_gap, kPropertyTol);

        const double s = scale(rng);
        auto scaled = g;
        for (auto& v : scaled.values) v *= s;
        const auto tsc = hjb::evolve(h, scaled, t);
        double homog_gap = 0.0;
        for (std::size_t k = 0; k < tsc.values.size(); ++k)
            homog_gap = std::max(homog_gap, std::abs(tsc.values[k] - s * tg.values[k]) /
                                                std::max(1.0, std::abs(s * tg.values[k])));
        homog.observe(homog_gap, kPropertyTol);

        const auto tc = hjb::evolve(h, hjb::sample(grid, [c](const hjb::Point&) { return c; }), t);
        double const_gap = 0.0;
        for (double v : tc.values) const_gap = std::max(const_gap, std::abs(v - c));
        constant.observe(const_gap, kPropertyTol);
    }
    return {mono, convex, cash, homog, constant};
}

}  // namespace nlx::testing
