#include "nlx/lattice/random.hpp"

#include <limits>

namespace nlx::lattice {

PathMeasure random_measure(Rng& rng, std::size_t leaves, LeafRange range, double zero_probability) {
    std::exponential_distribution<double> e(1.0);
    std::bernoulli_distribution drop(zero_probability);
    std::vector<double> w(leaves, 0.0);
    double total = 0.0;
    for (std::size_t i = range.begin; i < range.end; ++i) {
        w[i] = drop(rng) ? 0.0 : e(rng);
        total += w[i];
    }
    if (total == 0.0) {
        w[range.begin] = 1.0;
        total = 1.0;
    }
    for (auto& x : w) x /= total;
    return PathMeasure(std::move(w), 1e-12);
}

Functional random_functional(Rng& rng, std::size_t leaves, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> v(leaves);
    for (auto& x : v) x = u(rng);
    return Functional(std::move(v));
}

ScenarioTree random_tree(Rng& rng) {
    std::uniform_int_distribution<int> pick(2, 3);
    const int steps = pick(rng);
    const int states = pick(rng);
    return ScenarioTree(states, steps);
}

AmbiguitySet random_rectangular(Rng& rng, const ScenarioTree& tree, int max_vertices) {
    std::uniform_int_distribution<int> count(1, max_vertices);
    const auto m = static_cast<std::size_t>(tree.num_states());
    // Draw everything up front so the result does not depend on traversal order.
    std::vector<std::vector<std::vector<double>>> sets(tree.num_slots());
    for (int k = -1; k < tree.num_steps() - 1; ++k)
        for (std::size_t i = 0; i < tree.nodes_at(k); ++i) {
            auto& s = sets[tree.slot({k, i})];
            const int c = count(rng);
            for (int v = 0; v < c; ++v) {
                const PathMeasure p = random_measure(rng, m, {0, m});
                s.emplace_back(p.weights().begin(), p.weights().end());
            }
        }
    return rectangular_ambiguity(tree, [&](NodeId n) { return sets[tree.slot(n)]; });
}

AmbiguitySet random_ambiguity(Rng& rng, const ScenarioTree& tree, int max_members) {
    std::uniform_int_distribution<int> count(1, max_members);
    auto cat = std::make_shared<MeasureCatalogue>();
    std::vector<std::pair<NodeId, std::vector<std::size_t>>> rows;
    for (int k = -1; k < tree.num_steps(); ++k)
        for (std::size_t i = 0; i < tree.nodes_at(k); ++i) {
            const NodeId n{k, i};
            std::vector<std::size_t> ids;
            const int c = count(rng);
            for (int v = 0; v < c; ++v) {
                ids.push_back(cat->size());
                cat->push_back(random_measure(rng, tree.num_leaves(), tree.leaves(n), 0.2));
            }
            rows.emplace_back(n, std::move(ids));
        }
    AmbiguitySet set(tree, cat);
    for (auto& [n, ids] : rows) set.assign(n, std::move(ids));
    return set;
}

PenaltyTable random_penalty(Rng& rng, const ScenarioTree& tree, int per_node) {
    std::uniform_real_distribution<double> u(0.0, 2.0);
    auto cat = std::make_shared<MeasureCatalogue>();
    struct Entry {
        NodeId node;
        std::size_t id;
        double value;
    };
    std::vector<Entry> entries;
    for (int k = -1; k < tree.num_steps(); ++k)
        for (std::size_t i = 0; i < tree.nodes_at(k); ++i) {
            const NodeId n{k, i};
            for (int v = 0; v < per_node; ++v) {
                entries.push_back({n, cat->size(), v == 0 ? 0.0 : u(rng)});
                cat->push_back(random_measure(rng, tree.num_leaves(), tree.leaves(n), 0.2));
            }
        }
    PenaltyTable table(tree, cat);
    for (const auto& e : entries) table.set(e.node, e.id, e.value);
    // Measures of descendants are supported on ancestors too; give them a
    // finite penalty there as well so the catalogue is shared across levels.
    for (const auto& e : entries)
        for (int k = -1; k < e.node.level; ++k) {
            const NodeId up = k < 0 ? ScenarioTree::root() : tree.ancestor(tree.leaves(e.node).begin, k);
            table.set(up, e.id, e.value + u(rng));
        }
    return table;
}

}  // namespace nlx::lattice
