#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "nlx/core/errors.hpp"
#include "nlx/io/bundle.hpp"
#include "nlx/lattice/checks.hpp"
#include "nlx/lattice/pasting.hpp"
#include "nlx/lattice/random.hpp"

using namespace nlx;
using namespace nlx::lattice;

namespace {

using Vertices = std::vector<std::vector<double>>;

// Per-node step vertices drawn up front, keyed by slot.
std::vector<Vertices> random_steps(Rng& rng, const ScenarioTree& tree, int max_vertices) {
    std::uniform_int_distribution<int> count(1, max_vertices);
    const auto m = static_cast<std::size_t>(tree.num_states());
    std::vector<Vertices> steps(tree.num_slots());
    for (int k = -1; k < tree.num_steps() - 1; ++k)
        for (std::size_t i = 0; i < tree.nodes_at(k); ++i) {
            const int c = count(rng);
            for (int v = 0; v < c; ++v) {
                const auto p = random_measure(rng, m, {0, m});
                steps[tree.slot({k, i})].emplace_back(p.weights().begin(), p.weights().end());
            }
        }
    return steps;
}

// Backward induction over the step vertices: the worst-case value of a
// rectangular family, computed without measures or hulls.
double backward_oracle(const ScenarioTree& tree, const std::vector<Vertices>& steps, NodeId node,
                       const Functional& phi) {
    if (node.level == tree.num_steps() - 1) return phi[tree.leaves(node).begin];
    const auto kids = tree.children(node);
    std::vector<double> child(kids.size());
    for (std::size_t j = 0; j < kids.size(); ++j) child[j] = backward_oracle(tree, steps, kids[j], phi);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : steps[tree.slot(node)]) {
        double s = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) s += v[j] * child[j];
        best = std::max(best, s);
    }
    return best;
}

AmbiguitySet iid_family(const ScenarioTree& tree, double lo, double hi) {
    return rectangular_ambiguity(tree, [lo, hi](NodeId) { return Vertices{{lo, 1.0 - lo}, {hi, 1.0 - hi}}; });
}

io::Bundle fixture(const std::string& name) {
    return io::load_bundle(std::string(NLX_SOURCE_DIR) + "/data/fixtures/" + name + ".bundle");
}

}  // namespace

TEST_SUITE("checks") {

TEST_CASE("tower residual of a linear family vanishes") {
    Rng rng(1);
    for (int rep = 0; rep < 20; ++rep) {
        const auto tree = random_tree(rng);
        const auto n = tree.num_leaves();
        const LinearExpectation e(tree, random_measure(rng, n, {0, n}, 0.2));
        CHECK(max_tower_residual(e, random_functional(rng, n)) <= 1e-12);
    }
}

TEST_CASE("rectangular worst case matches backward induction") {
    Rng rng(2);
    for (int rep = 0; rep < 20; ++rep) {
        const auto tree = random_tree(rng);
        const auto steps = random_steps(rng, tree, 2);
        const auto set = rectangular_ambiguity(tree, [&](NodeId n) { return steps[tree.slot(n)]; });
        const WorstCaseExpectation e(set);
        const auto phi = random_functional(rng, tree.num_leaves());
        for (int k = -1; k < tree.num_steps(); ++k)
            for (std::size_t i = 0; i < tree.nodes_at(k); ++i)
                CHECK(std::abs(e.evaluate({k, i}, phi) - backward_oracle(tree, steps, {k, i}, phi)) <= 1e-12);
        CHECK(max_tower_residual(e, phi) <= 1e-12);
        CHECK(check_stability(set).pass());
    }
}

TEST_CASE("non-stable fixture breaks the tower property") {
    const auto b = fixture("nonstable");
    REQUIRE(b.ambiguity.has_value());
    const WorstCaseExpectation e(*b.ambiguity);
    const auto& phi = b.functionals.at(0).second;
    // E_0(phi) = 0.6 on both nodes, while either prior gives 0.52.
    CHECK(tower_residual(e, 0, ScenarioTree::root(), phi) == doctest::Approx(0.08).epsilon(1e-12));
    CHECK(max_tower_residual(e, phi) > 1e-3);
    const auto report = check_stability(*b.ambiguity);
    CHECK_FALSE(report.pass());
    CHECK_FALSE(report.pasting_stable);
    CHECK_FALSE(report.witness.empty());
}

TEST_CASE("stability of a single prior and its conditionals") {
    const ScenarioTree tree(2, 2);
    const PathMeasure prior({0.1, 0.2, 0.3, 0.4});
    auto cat = std::make_shared<MeasureCatalogue>();
    AmbiguitySet set(tree, cat);
    std::vector<std::pair<NodeId, std::size_t>> rows;
    for (int k = -1; k < tree.num_steps(); ++k)
        for (std::size_t i = 0; i < tree.nodes_at(k); ++i) {
            rows.emplace_back(NodeId{k, i}, cat->size());
            cat->push_back(conditional(tree, prior, {k, i}));
        }
    for (const auto& [n, id] : rows) set.assign(n, {id});
    const auto r = check_stability(set);
    CHECK(r.pass());
    CHECK(r.witness.empty());
}

TEST_CASE("i.i.d. uncertainty is stable") {
    CHECK(check_stability(iid_family(ScenarioTree(2, 3), 0.4, 0.6)).pass());
    CHECK(check_stability(iid_family(ScenarioTree(2, 2), 0.4, 0.6), -1, 0).pass());
}

TEST_CASE("two extreme priors over the conditionals of a third are not stable") {
    const ScenarioTree tree(2, 2);
    auto cat = std::make_shared<MeasureCatalogue>(MeasureCatalogue{
        PathMeasure({0.16, 0.24, 0.24, 0.36}), PathMeasure({0.36, 0.24, 0.24, 0.16}),
        PathMeasure({0.5, 0.5, 0.0, 0.0}), PathMeasure({0.0, 0.0, 0.5, 0.5})});
    AmbiguitySet set(tree, cat);
    set.assign(ScenarioTree::root(), {0, 1});
    set.assign({0, 0}, {2});
    set.assign({0, 1}, {3});
    const auto r = check_stability(set, -1, 0);
    CHECK_FALSE(r.pass());
    CHECK_FALSE(r.conditioning_stable);
    CHECK(r.worst_distance > 0.1);
    CHECK_FALSE(r.witness.empty());
}

TEST_CASE("stability refuses oversized kernel enumerations") {
    const auto set = iid_family(ScenarioTree(2, 3), 0.4, 0.6);
    CHECK_THROWS_AS((void)check_stability(set, -1, 1, default_tolerances(), 2), NumericRefusal);
}

TEST_CASE("marginal uniqueness") {
    const ScenarioTree tree(2, 2);
    const LinearExpectation lin(tree, PathMeasure({0.1, 0.2, 0.3, 0.4}));
    const auto same = marginal_uniqueness_check(lin, lin, -1, 5, 200);
    CHECK(same.agree(1e-10));

    const auto set = iid_family(tree, 0.4, 0.6);
    const WorstCaseExpectation a(set);
    const WorstCaseExpectation b(with_midpoints(set));
    CHECK(b.set().members(ScenarioTree::root()).size() > set.members(ScenarioTree::root()).size());
    const auto eq = marginal_uniqueness_check(a, b, -1, 6, 1000);
    CHECK(eq.randoms_tested == 1000);
    CHECK(eq.agree(1e-10));
    CHECK(eq.consistent(1e-10));

    const WorstCaseExpectation c(shrink_members(set, ScenarioTree::root(), 0.5));
    const auto diff = marginal_uniqueness_check(a, c, -1, 7, 100);
    CHECK(diff.cylinder_gap > 1e-10);
    REQUIRE(diff.witness.has_value());
    // The witness is one of the cylinder indicators, possibly negated.
    const auto cyl = cylinder_indicators(tree);
    const bool found = std::any_of(cyl.begin(), cyl.end(), [&](const Functional& f) {
        bool pos = true, neg = true;
        for (std::size_t l = 0; l < f.size(); ++l) {
            pos = pos && f[l] == (*diff.witness)[l];
            neg = neg && -f[l] == (*diff.witness)[l];
        }
        return pos || neg;
    });
    CHECK(found);
    const auto node = diff.witness_node.value_or(ScenarioTree::root());
    CHECK(std::abs(a.evaluate(node, *diff.witness) - c.evaluate(node, *diff.witness)) > 1e-10);
}

TEST_CASE("cylinder indicators cover every coordinate set") {
    const ScenarioTree tree(2, 2);
    // {X0}: 2, {X1}: 2, {X0, X1}: 4.
    CHECK(cylinder_indicators(tree).size() == 8);
    for (const auto& f : cylinder_indicators(tree))
        for (double v : f.values()) CHECK((v == 0.0 || v == 1.0));
}

TEST_CASE("midpoints keep the hull and shrinking changes it") {
    const auto set = iid_family(ScenarioTree(2, 2), 0.3, 0.8);
    const auto mid = with_midpoints(set);
    const auto shrunk = shrink_members(set, ScenarioTree::root(), 0.5);
    const WorstCaseExpectation a(set), b(mid), c(shrunk);
    Rng rng(4);
    double gap = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto phi = random_functional(rng, 4);
        CHECK(std::abs(a.evaluate(ScenarioTree::root(), phi) - b.evaluate(ScenarioTree::root(), phi)) <= 1e-12);
        CHECK(c.evaluate(ScenarioTree::root(), phi) <= a.evaluate(ScenarioTree::root(), phi) + 1e-12);
        gap = std::max(gap, a.evaluate(ScenarioTree::root(), phi) - c.evaluate(ScenarioTree::root(), phi));
    }
    CHECK(gap > 1e-3);
    CHECK_THROWS_AS((void)shrink_members(set, ScenarioTree::root(), 1.5), InvalidInput);
}

TEST_CASE("shift homogeneity") {
    const ScenarioTree tree(2, 3);
    const WorstCaseExpectation iid(iid_family(tree, 0.4, 0.6));
    Rng rng(8);
    const auto phi = random_functional(rng, tree.num_leaves());
    CHECK(shift_homogeneity_residual(iid, 0, phi) == 0.0);
    CHECK(shift_homogeneity_residual(iid, 1, phi) <= 1e-12);

    // The root step is pinned at p = 0.5; later steps keep the band.
    const WorstCaseExpectation varying(rectangular_ambiguity(tree, [](NodeId n) {
        return n.level < 0 ? Vertices{{0.5, 0.5}} : Vertices{{0.4, 0.6}, {0.6, 0.4}};
    }));
    CHECK(shift_homogeneity_residual(varying, 1, phi) > 1e-6);
    CHECK_THROWS_AS((void)shift_homogeneity_residual(iid, 4, phi), InvalidInput);
    CHECK_THROWS_AS((void)shift_homogeneity_residual(iid, -1, phi), InvalidInput);
}

TEST_CASE("product measure multiplies the chosen transitions") {
    const ScenarioTree tree(2, 2);
    const std::vector<double> root{0.3, 0.7}, left{0.5, 0.5}, right{0.1, 0.9};
    const auto p = product_measure(tree, ScenarioTree::root(), [&](NodeId n) -> const std::vector<double>& {
        if (n.level < 0) return root;
        return n.index == 0 ? left : right;
    });
    CHECK(p[0] == doctest::Approx(0.15));
    CHECK(p[1] == doctest::Approx(0.15));
    CHECK(p[2] == doctest::Approx(0.07));
    CHECK(p[3] == doctest::Approx(0.63));
}

}  // TEST_SUITE
