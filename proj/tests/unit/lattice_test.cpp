#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "doctest.h"
#include "nlx/core/errors.hpp"
#include "nlx/lattice/expectations.hpp"
#include "nlx/lattice/measure.hpp"
#include "nlx/lattice/pasting.hpp"
#include "nlx/lattice/random.hpp"
#include "nlx/lattice/scenario_tree.hpp"

using namespace nlx;
using namespace nlx::lattice;

namespace {

std::shared_ptr<MeasureCatalogue> catalogue(std::vector<std::vector<double>> rows) {
    auto cat = std::make_shared<MeasureCatalogue>();
    for (auto& r : rows) cat->emplace_back(std::move(r));
    return cat;
}

// Independent oracle: sup over the catalogue, written without the library loop.
double brute_convex(const PenaltyTable& t, NodeId node, const Functional& phi) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < t.catalogue().size(); ++m) {
        const double a = t.at(node, m);
        if (std::isinf(a)) continue;
        double s = 0.0;
        for (std::size_t l = 0; l < phi.size(); ++l) s += t.catalogue()[m][l] * phi[l];
        best = std::max(best, s - a);
    }
    return best;
}

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("leaves are lexicographic and nodes own contiguous ranges") {
    const ScenarioTree tree(3, 2);
    CHECK(tree.num_leaves() == 9);
    CHECK(tree.nodes_at(-1) == 1);
    CHECK(tree.nodes_at(0) == 3);
    CHECK(tree.nodes_at(1) == 9);
    CHECK(tree.node_count() == 12);
    CHECK(tree.path(5) == std::vector<int>{1, 2});
    const auto r = tree.leaves({0, 2});
    CHECK(r.begin == 6);
    CHECK(r.end == 9);
    for (std::size_t leaf = 0; leaf < tree.num_leaves(); ++leaf) {
        const auto p = tree.path(leaf);
        CHECK(tree.leaf_of(p) == leaf);
        CHECK(tree.ancestor(leaf, 0).index == static_cast<std::size_t>(p[0]));
    }
    CHECK(tree.children({0, 1}).size() == 3);
    CHECK(tree.descendants(ScenarioTree::root(), 1).size() == 9);
    CHECK(tree.history({1, 7}) == std::vector<int>{2, 1});
    CHECK(tree.node_of(std::vector<int>{2, 1}) == NodeId{1, 7});
}

TEST_CASE("slots are dense and distinct") {
    const ScenarioTree tree(2, 3);
    std::vector<int> seen(tree.num_slots(), 0);
    for (int k = -1; k < tree.num_steps(); ++k)
        for (std::size_t i = 0; i < tree.nodes_at(k); ++i) ++seen[tree.slot({k, i})];
    for (int s : seen) CHECK(s == 1);
}

TEST_CASE("time window and past segment") {
    const ScenarioTree tree(2, 2, 5, {1, 0});
    CHECK(tree.time_of(0) == 5);
    CHECK(tree.level_at(6) == 1);
    CHECK(tree.level_at(4) == -1);
    CHECK_THROWS_AS((void)tree.level_at(9), InvalidInput);
    CHECK_THROWS_AS(ScenarioTree(2, 2, 0, {3}), InvalidInput);
    CHECK_THROWS_AS(ScenarioTree(2, 0), InvalidInput);
    CHECK_THROWS_AS(tree.require({2, 0}), InvalidInput);
}

TEST_CASE("measure validation") {
    CHECK_THROWS_AS(PathMeasure({0.5, 0.6}), InvalidInput);
    CHECK_THROWS_AS(PathMeasure({1.2, -0.2}), InvalidInput);
    CHECK_NOTHROW(PathMeasure({0.5, 0.5 + 1e-13}));
    const auto u = PathMeasure::uniform_on(4, {2, 4});
    CHECK(u[2] == doctest::Approx(0.5));
    CHECK(u.supported_on({2, 4}));
    CHECK_FALSE(u.supported_on({0, 3}));
    CHECK(u.mass({0, 3}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(Functional({1.0, std::nan("")}), InvalidInput);
}

TEST_CASE("expected value") {
    const Functional phi({1.0, 0.0});
    CHECK(expected_value(PathMeasure::uniform(2), phi) == doctest::Approx(0.5));
    const Functional psi({3.0, -1.5, 2.0});
    for (std::size_t j = 0; j < 3; ++j) CHECK(expected_value(PathMeasure::dirac(3, j), psi) == psi[j]);
    CHECK(expected_value(PathMeasure({0.9, 0.1}), phi) == doctest::Approx(0.9));
    CHECK_THROWS_AS((void)expected_value(PathMeasure::uniform(3), phi), InvalidInput);
}

TEST_CASE("convex expectation over a penalty table") {
    const ScenarioTree tree(2, 1);
    const Functional phi({1.0, 0.0});
    PenaltyTable single(tree, catalogue({{0.3, 0.7}}));
    single.set(ScenarioTree::root(), 0, 0.0);
    CHECK(convex_expectation(single, ScenarioTree::root(), phi) == doctest::Approx(0.3));

    PenaltyTable two(tree, catalogue({{0.5, 0.5}, {0.9, 0.1}}));
    two.set(ScenarioTree::root(), 0, 0.0);
    two.set(ScenarioTree::root(), 1, 0.0);
    CHECK(convex_expectation(two, ScenarioTree::root(), phi) == doctest::Approx(0.9));
    CHECK(convex_argmax(two, ScenarioTree::root(), phi) == 1);
    two.set(ScenarioTree::root(), 1, 0.3);
    CHECK(convex_expectation(two, ScenarioTree::root(), phi) == doctest::Approx(0.6));
}

TEST_CASE("convex expectation errors") {
    const ScenarioTree tree(2, 1);
    PenaltyTable empty(tree, catalogue({}));
    CHECK_THROWS_AS((void)convex_expectation(empty, ScenarioTree::root(), Functional({1.0, 0.0})), InvalidInput);
    PenaltyTable none(tree, catalogue({{0.5, 0.5}}));
    CHECK_THROWS_AS((void)convex_expectation(none, ScenarioTree::root(), Functional({1.0, 0.0})), InvalidInput);
    CHECK_THROWS_AS(none.set(ScenarioTree::root(), 0, -1.0), InvalidInput);
}

TEST_CASE("argmax ties go to the lowest catalogue index") {
    const ScenarioTree tree(2, 1);
    PenaltyTable t(tree, catalogue({{0.5, 0.5}, {0.5, 0.5}, {0.2, 0.8}}));
    for (std::size_t m = 0; m < 3; ++m) t.set(ScenarioTree::root(), m, 0.0);
    CHECK(convex_argmax(t, ScenarioTree::root(), Functional({1.0, 0.0})) == 0);
    CHECK(convex_argmax(t, ScenarioTree::root(), Functional({0.0, 1.0})) == 2);
}

TEST_CASE("convex expectation matches brute force on random tables") {
    Rng rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        const auto tree = random_tree(rng);
        const auto table = random_penalty(rng, tree);
        const auto phi = random_functional(rng, tree.num_leaves());
        for (int k = -1; k < tree.num_steps(); ++k)
            for (std::size_t i = 0; i < tree.nodes_at(k); ++i)
                CHECK(convex_expectation(table, {k, i}, phi) == doctest::Approx(brute_convex(table, {k, i}, phi)));
        CHECK(table.violations().empty());
    }
}

TEST_CASE("sublinear expectation") {
    const ScenarioTree tree(2, 1);
    const Functional phi({1.0, 0.0});
    AmbiguitySet one(tree, catalogue({{0.3, 0.7}}));
    one.assign(ScenarioTree::root(), {0});
    CHECK(sublinear_expectation(one, ScenarioTree::root(), phi) == doctest::Approx(0.3));

    AmbiguitySet two(tree, catalogue({{0.5, 0.5}, {0.9, 0.1}}));
    two.assign(ScenarioTree::root(), {0, 1});
    CHECK(sublinear_expectation(two, ScenarioTree::root(), phi) == doctest::Approx(0.9));
    for (double c : {-3.0, 0.0, 2.5})
        CHECK(sublinear_expectation(two, ScenarioTree::root(), Functional::constant(2, c)) == doctest::Approx(c));

    // Same values as the {0, +inf} penalty.
    const auto alpha = indicator_penalty(two);
    CHECK(convex_expectation(alpha, ScenarioTree::root(), phi) == doctest::Approx(0.9));
}

TEST_CASE("ambiguity set validation") {
    const ScenarioTree tree(2, 2);
    AmbiguitySet set(tree, catalogue({{1, 0, 0, 0}, {0, 0, 0.5, 0.5}}));
    CHECK_THROWS_AS(set.assign({0, 0}, {}), InvalidInput);
    CHECK_THROWS_AS(set.assign({0, 0}, {7}), InvalidInput);
    CHECK_THROWS_AS(set.assign({0, 0}, {1}), InvalidInput);
    set.assign({0, 0}, {0, 0});
    CHECK(set.members({0, 0}).size() == 1);
    CHECK_THROWS_AS((void)sublinear_expectation(set, {0, 1}, Functional({1, 2, 3, 4})), InvalidInput);
}

TEST_CASE("sup over vertices bounds every convex combination") {
    Rng rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const auto tree = random_tree(rng);
        const auto set = random_ambiguity(rng, tree, 4);
        const auto phi = random_functional(rng, tree.num_leaves());
        const auto members = set.member_measures(ScenarioTree::root());
        std::vector<double> mix(tree.num_leaves(), 0.0);
        double total = 0.0;
        std::vector<double> w(members.size());
        for (auto& x : w) total += (x = u(rng));
        for (std::size_t m = 0; m < members.size(); ++m)
            for (std::size_t l = 0; l < mix.size(); ++l) mix[l] += w[m] / total * members[m][l];
        const double hull_point = expected_value(PathMeasure(mix, 1e-9), phi);
        CHECK(hull_point <= sublinear_expectation(set, ScenarioTree::root(), phi) + 1e-12);
    }
}

TEST_CASE("entropic expectation") {
    const auto p = PathMeasure::uniform(2);
    const Functional phi({1.0, 0.0});
    for (double c : {-2.0, 0.0, 4.0})
        for (double eps : {0.01, 1.0, 10.0})
            CHECK(entropic_expectation(p, eps, Functional::constant(2, c)) == doctest::Approx(c).epsilon(1e-12));
    CHECK(entropic_expectation(p, 1.0, phi) == doctest::Approx(std::log((std::exp(1.0) + 1.0) / 2.0)));
    CHECK(entropic_expectation(p, 1.0, phi) == doctest::Approx(0.62011).epsilon(1e-5));
    CHECK(std::abs(entropic_expectation(p, 0.01, phi) - 1.0) <= 7e-3);
    CHECK_THROWS_AS((void)entropic_expectation(p, 0.0, phi), InvalidInput);
    CHECK_THROWS_AS((void)entropic_expectation(p, -1.0, phi), InvalidInput);
}

TEST_CASE("entropic expectation is stable for large phi over eps") {
    const auto p = PathMeasure({0.25, 0.75});
    const double v = entropic_expectation(p, 1e-4, Functional({1.0, -1.0}));
    CHECK(std::isfinite(v));
    // eps log(0.25 e^{1/eps} + ...) = 1 + eps log 0.25 up to e^{-2/eps}.
    CHECK(v == doctest::Approx(1.0 + 1e-4 * std::log(0.25)).epsilon(1e-12));
    CHECK(entropic_expectation(p, 1e-4, Functional({-1.0, -1.0})) == doctest::Approx(-1.0));
}

TEST_CASE("entropic family uses the conditional prior") {
    const ScenarioTree tree(2, 2);
    const PathMeasure prior({0.6, 0.2, 0.15, 0.05});
    const EntropicExpectation e(tree, prior, 1.0);
    const Functional phi({1.0, 0.0, 0.5, -1.0});
    const double expect = std::log(0.75 * std::exp(1.0) + 0.25);
    CHECK(e.evaluate({0, 0}, phi) == doctest::Approx(expect));
    CHECK(e.evaluate({1, 2}, phi) == doctest::Approx(0.5));
    const auto gibbs = e.active_measure({0, 0}, phi);
    CHECK(gibbs[0] == doctest::Approx(0.75 * std::exp(1.0) / (0.75 * std::exp(1.0) + 0.25)));
    CHECK(gibbs[2] == 0.0);
}

TEST_CASE("regular conditional") {
    const ScenarioTree tree(2, 2);
    const auto dirac = PathMeasure::dirac(4, 2);
    const auto kd = regular_conditional(tree, dirac, 0);
    CHECK(kd.by_node[1] == dirac);
    const auto ku = regular_conditional(tree, PathMeasure::uniform(4), 0);
    CHECK(ku.by_node[0][0] == doctest::Approx(0.5));
    CHECK(ku.by_node[0][1] == doctest::Approx(0.5));
    CHECK(ku.by_node[1][3] == doctest::Approx(0.5));
    const PathMeasure p({0.6, 0.2, 0.15, 0.05});
    const auto k = regular_conditional(tree, p, 0);
    CHECK(k.by_node[0][0] == doctest::Approx(0.75));
    CHECK(k.by_node[0][1] == doctest::Approx(0.25));
    CHECK(k.by_node[1][2] == doctest::Approx(0.75));
    CHECK(k.by_node[1][3] == doctest::Approx(0.25));
    // No mass below node (0, 0): uniform on its leaves.
    const auto kz = regular_conditional(tree, PathMeasure({0, 0, 0.5, 0.5}), 0);
    CHECK(kz.by_node[0][0] == doctest::Approx(0.5));
    CHECK(kz.by_node[0][1] == doctest::Approx(0.5));
}

TEST_CASE("pasting") {
    const ScenarioTree tree(2, 2);
    const PathMeasure p({0.6, 0.2, 0.15, 0.05});
    CHECK(paste_measures(tree, p, regular_conditional(tree, p, 0)) == p);

    const auto u = PathMeasure::uniform(4);
    Kernel up{0, {PathMeasure::dirac(4, 0), PathMeasure::dirac(4, 2)}};
    const auto pasted = paste_measures(tree, u, up);
    CHECK(pasted[0] == doctest::Approx(0.5));
    CHECK(pasted[1] == 0.0);
    CHECK(pasted[2] == doctest::Approx(0.5));
    CHECK(pasted[3] == 0.0);

    // At the last level each kernel entry is a Dirac on its own leaf.
    const auto last = paste_measures(tree, p, regular_conditional(tree, PathMeasure::uniform(4), 1));
    for (std::size_t l = 0; l < 4; ++l) CHECK(last[l] == doctest::Approx(p[l]));

    Kernel bad{0, {PathMeasure::dirac(4, 3), PathMeasure::dirac(4, 2)}};
    CHECK_THROWS_AS((void)paste_measures(tree, u, bad), InvalidInput);
}

TEST_CASE("pasting weights are ancestor mass times kernel weight") {
    Rng rng(3);
    for (int rep = 0; rep < 30; ++rep) {
        const auto tree = random_tree(rng);
        const auto n = tree.num_leaves();
        const auto p = random_measure(rng, n, {0, n}, 0.2);
        std::uniform_int_distribution<int> lvl(0, tree.num_steps() - 1);
        Kernel k{lvl(rng), {}};
        for (std::size_t i = 0; i < tree.nodes_at(k.level); ++i)
            k.by_node.push_back(random_measure(rng, n, tree.leaves({k.level, i})));
        const auto q = paste_measures(tree, p, k);
        for (std::size_t leaf = 0; leaf < n; ++leaf) {
            const auto anc = tree.ancestor(leaf, k.level);
            CHECK(q[leaf] == doctest::Approx(p.mass(tree.leaves(anc)) * k.by_node[anc.index][leaf]));
        }
    }
}

TEST_CASE("evaluate_level and lift") {
    const ScenarioTree tree(2, 2);
    const LinearExpectation e(tree, PathMeasure({0.1, 0.2, 0.3, 0.4}));
    const Functional phi({1.0, 2.0, 3.0, 4.0});
    const auto v = evaluate_level(e, 0, phi);
    CHECK(v[0] == doctest::Approx((0.1 + 0.4) / 0.3));
    CHECK(v[1] == doctest::Approx((0.9 + 1.6) / 0.7));
    const auto f = lift(tree, 0, v);
    CHECK(f[0] == f[1]);
    CHECK(f[2] == v[1]);
}

}  // TEST_SUITE
