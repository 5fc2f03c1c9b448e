#include "nlx/lattice/scenario_tree.hpp"

#include <string>

#include "nlx/core/errors.hpp"

namespace nlx::lattice {

ScenarioTree::ScenarioTree(int num_states, int num_steps, int first_time, std::vector<int> past)
    : states_(num_states), steps_(num_steps), t0_(first_time), past_(std::move(past)), leaves_(1) {
    if (num_states < 1) throw InvalidInput("scenario tree needs at least one state");
    if (num_steps < 1) throw InvalidInput("scenario tree needs at least one step");
    for (int s : past_)
        if (s < 0 || s >= states_) throw InvalidInput("past state out of range");
    for (int k = 0; k < steps_; ++k) {
        if (leaves_ > (std::size_t{1} << 40) / static_cast<std::size_t>(states_))
            throw InvalidInput("scenario tree too large");
        leaves_ *= static_cast<std::size_t>(states_);
    }
}

std::size_t ScenarioTree::pow_states(int k) const noexcept {
    std::size_t p = 1;
    for (int i = 0; i < k; ++i) p *= static_cast<std::size_t>(states_);
    return p;
}

int ScenarioTree::level_at(int time) const {
    const int level = time - t0_;
    if (level < -1 || level >= steps_)
        throw InvalidInput("time " + std::to_string(time) + " outside the tree window");
    return level;
}

std::size_t ScenarioTree::nodes_at(int level) const {
    if (level < -1 || level >= steps_) throw InvalidInput("level outside the tree");
    return pow_states(level + 1);
}

std::size_t ScenarioTree::node_count() const noexcept {
    std::size_t total = 0;
    for (int k = 0; k < steps_; ++k) total += pow_states(k + 1);
    return total;
}

std::size_t ScenarioTree::slot(NodeId node) const {
    require(node);
    std::size_t offset = 0;
    for (int k = -1; k < node.level; ++k) offset += pow_states(k + 1);
    return offset + node.index;
}

bool ScenarioTree::contains(NodeId node) const noexcept {
    return node.level >= -1 && node.level < steps_ && node.index < pow_states(node.level + 1);
}

void ScenarioTree::require(NodeId node) const {
    if (!contains(node))
        throw InvalidInput("node (" + std::to_string(node.level) + "," + std::to_string(node.index) +
                           ") not in scenario tree");
}

LeafRange ScenarioTree::leaves(NodeId node) const {
    require(node);
    const std::size_t width = pow_states(steps_ - 1 - node.level);
    return {node.index * width, (node.index + 1) * width};
}

NodeId ScenarioTree::ancestor(std::size_t leaf, int level) const {
    if (leaf >= leaves_) throw InvalidInput("leaf index out of range");
    if (level < -1 || level >= steps_) throw InvalidInput("level outside the tree");
    return {level, leaf / pow_states(steps_ - 1 - level)};
}

std::vector<NodeId> ScenarioTree::children(NodeId node) const {
    require(node);
    std::vector<NodeId> out;
    if (node.level + 1 >= steps_) return out;
    const auto m = static_cast<std::size_t>(states_);
    for (std::size_t e = 0; e < m; ++e) out.push_back({node.level + 1, node.index * m + e});
    return out;
}

std::vector<NodeId> ScenarioTree::descendants(NodeId node, int level) const {
    require(node);
    if (level < node.level || level >= steps_) throw InvalidInput("descendant level outside the tree");
    const std::size_t width = pow_states(level - node.level);
    std::vector<NodeId> out;
    out.reserve(width);
    for (std::size_t i = 0; i < width; ++i) out.push_back({level, node.index * width + i});
    return out;
}

std::vector<int> ScenarioTree::path(std::size_t leaf) const {
    if (leaf >= leaves_) throw InvalidInput("leaf index out of range");
    std::vector<int> out(static_cast<std::size_t>(steps_));
    for (int k = steps_ - 1; k >= 0; --k) {
        out[static_cast<std::size_t>(k)] = static_cast<int>(leaf % static_cast<std::size_t>(states_));
        leaf /= static_cast<std::size_t>(states_);
    }
    return out;
}

std::size_t ScenarioTree::leaf_of(std::span<const int> path) const {
    if (path.size() != static_cast<std::size_t>(steps_)) throw InvalidInput("path length mismatch");
    return node_of(path).index;
}

std::vector<int> ScenarioTree::history(NodeId node) const {
    require(node);
    std::vector<int> out(static_cast<std::size_t>(node.level + 1));
    std::size_t idx = node.index;
    for (int k = node.level; k >= 0; --k) {
        out[static_cast<std::size_t>(k)] = static_cast<int>(idx % static_cast<std::size_t>(states_));
        idx /= static_cast<std::size_t>(states_);
    }
    return out;
}

NodeId ScenarioTree::node_of(std::span<const int> history) const {
    if (history.size() > static_cast<std::size_t>(steps_)) throw InvalidInput("history longer than the window");
    std::size_t idx = 0;
    for (int s : history) {
        if (s < 0 || s >= states_) throw InvalidInput("state out of range");
        idx = idx * static_cast<std::size_t>(states_) + static_cast<std::size_t>(s);
    }
    return {static_cast<int>(history.size()) - 1, idx};
}

}  // namespace nlx::lattice
