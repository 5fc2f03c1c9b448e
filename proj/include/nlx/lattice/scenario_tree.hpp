#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nlx::lattice {

/// A node is a history: the states observed at levels 0..level.
/// Level -1 is the root, i.e. the fixed past before the window opens.
struct NodeId {
    int level = -1;
    std::size_t index = 0;

    friend bool operator==(const NodeId&, const NodeId&) = default;
};

/// Half-open range of leaf indices.
struct LeafRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t size() const noexcept { return end - begin; }
    [[nodiscard]] bool contains(std::size_t leaf) const noexcept { return leaf >= begin && leaf < end; }
};

/// Finite path space over a window of consecutive integer times.
///
/// Paths take values in {0, ..., m-1} at times t0, t0+1, ..., t0+steps-1.
/// Leaves are full paths in lexicographic order (the state at t0 is the most
/// significant digit), so the leaves below a node form a contiguous range.
/// The fixed past segment (states before t0) is shared by every leaf.
class ScenarioTree {
public:
    ScenarioTree(int num_states, int num_steps, int first_time = 0, std::vector<int> past = {});

    [[nodiscard]] int num_states() const noexcept { return states_; }
    [[nodiscard]] int num_steps() const noexcept { return steps_; }
    [[nodiscard]] int first_time() const noexcept { return t0_; }
    [[nodiscard]] const std::vector<int>& past() const noexcept { return past_; }

    [[nodiscard]] int time_of(int level) const noexcept { return t0_ + level; }
    /// Level whose history ends at `time`; the root sits at first_time() - 1.
    [[nodiscard]] int level_at(int time) const;

    [[nodiscard]] std::size_t num_leaves() const noexcept { return leaves_; }
    [[nodiscard]] std::size_t nodes_at(int level) const;
    /// Number of non-root nodes, sum over levels k of m^(k+1).
    [[nodiscard]] std::size_t node_count() const noexcept;
    /// Dense slot for per-node tables: root is 0, then level by level.
    [[nodiscard]] std::size_t slot(NodeId node) const;
    [[nodiscard]] std::size_t num_slots() const noexcept { return node_count() + 1; }

    [[nodiscard]] static NodeId root() noexcept { return {-1, 0}; }
    [[nodiscard]] bool contains(NodeId node) const noexcept;
    void require(NodeId node) const;

    [[nodiscard]] LeafRange leaves(NodeId node) const;
    [[nodiscard]] NodeId ancestor(std::size_t leaf, int level) const;
    [[nodiscard]] std::vector<NodeId> children(NodeId node) const;
    /// Nodes at `level` below `node` (level >= node.level).
    [[nodiscard]] std::vector<NodeId> descendants(NodeId node, int level) const;

    [[nodiscard]] std::vector<int> path(std::size_t leaf) const;
    [[nodiscard]] std::size_t leaf_of(std::span<const int> path) const;
    [[nodiscard]] std::vector<int> history(NodeId node) const;
    [[nodiscard]] NodeId node_of(std::span<const int> history) const;

    friend bool operator==(const ScenarioTree&, const ScenarioTree&) = default;

private:
    [[nodiscard]] std::size_t pow_states(int k) const noexcept;

    int states_;
    int steps_;
    int t0_;
    std::vector<int> past_;
    std::size_t leaves_;
};

}  // namespace nlx::lattice
