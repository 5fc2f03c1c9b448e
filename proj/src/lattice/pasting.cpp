#include "nlx/lattice/pasting.hpp"

#include <string>

#include "nlx/core/errors.hpp"

namespace nlx::lattice {

PathMeasure conditional(const ScenarioTree& tree, const PathMeasure& p, NodeId node) {
    if (p.size() != tree.num_leaves()) throw InvalidInput("measure does not match the tree");
    const LeafRange range = tree.leaves(node);
    const double mass = p.mass(range);
    if (!(mass > 0.0)) return PathMeasure::uniform_on(tree.num_leaves(), range);
    std::vector<double> w(tree.num_leaves(), 0.0);
    for (std::size_t i = range.begin; i < range.end; ++i) w[i] = p[i] / mass;
    return PathMeasure(std::move(w), 1e-9);
}

Kernel regular_conditional(const ScenarioTree& tree, const PathMeasure& p, int level) {
    Kernel k;
    k.level = level;
    const std::size_t n = tree.nodes_at(level);
    k.by_node.reserve(n);
    for (std::size_t i = 0; i < n; ++i) k.by_node.push_back(conditional(tree, p, {level, i}));
    return k;
}

PathMeasure paste_measures(const ScenarioTree& tree, const PathMeasure& p, const Kernel& kernel, double tol) {
    if (p.size() != tree.num_leaves()) throw InvalidInput("measure does not match the tree");
    const std::size_t n = tree.nodes_at(kernel.level);
    if (kernel.by_node.size() != n) throw InvalidInput("kernel does not cover every node of its level");
    std::vector<double> w(tree.num_leaves(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const NodeId node{kernel.level, i};
        const LeafRange range = tree.leaves(node);
        const PathMeasure& q = kernel.by_node[i];
        if (q.size() != tree.num_leaves()) throw InvalidInput("kernel measure does not match the tree");
        if (!q.supported_on(range, tol))
            throw InvalidInput("kernel entry for node " + std::to_string(i) + " charges leaves outside the node");
        const double mass = p.mass(range);
        for (std::size_t leaf = range.begin; leaf < range.end; ++leaf) w[leaf] = mass * q[leaf];
    }
    return PathMeasure(std::move(w), 1e-9);
}

}  // namespace nlx::lattice
