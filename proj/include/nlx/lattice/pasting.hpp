#pragma once

#include <vector>

#include "nlx/lattice/measure.hpp"
#include "nlx/lattice/scenario_tree.hpp"

namespace nlx::lattice {

/// Node-indexed family of measures at one level; entry i is supported on
/// the leaves below node (level, i).
struct Kernel {
    int level = -1;
    std::vector<PathMeasure> by_node;
};

/// P(. | node). Nodes without P-mass get the uniform measure on their leaves.
[[nodiscard]] PathMeasure conditional(const ScenarioTree& tree, const PathMeasure& p, NodeId node);

/// Regular version of the conditional probability given the history up to `level`.
[[nodiscard]] Kernel regular_conditional(const ScenarioTree& tree, const PathMeasure& p, int level);

/// P before `kernel.level`, the kernel afterwards:
/// (P (x) Q)(leaf) = P([leaf]_s) * Q_{[leaf]_s}(leaf).
/// Throws InvalidInput if some kernel entry charges leaves outside its node.
[[nodiscard]] PathMeasure paste_measures(const ScenarioTree& tree, const PathMeasure& p, const Kernel& kernel,
                                         double tol = 1e-12);

}  // namespace nlx::lattice
