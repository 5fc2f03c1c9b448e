#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace nlx::hjb {

using Point = std::array<double, 2>;  // second entry unused in 1D

enum class BoundaryRule { neumann, dirichlet };

[[nodiscard]] BoundaryRule parse_boundary(const std::string& name);
[[nodiscard]] std::string to_string(BoundaryRule rule);

struct Axis {
    double lower = 0.0;
    double upper = 0.0;
    double step = 0.0;
};

/// Uniform tensor grid in one or two dimensions. The outermost ring of nodes
/// is the boundary; everything else is interior and carries the stencil.
class SpatialGrid {
public:
    SpatialGrid(std::vector<Axis> axes, BoundaryRule rule = BoundaryRule::neumann);
    static SpatialGrid line(double lower, double upper, double step, BoundaryRule rule = BoundaryRule::neumann);
    static SpatialGrid square(double lower, double upper, double step, BoundaryRule rule = BoundaryRule::neumann);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(axes_.size()); }
    [[nodiscard]] const Axis& axis(int k) const { return axes_.at(static_cast<std::size_t>(k)); }
    [[nodiscard]] std::size_t points(int k) const { return counts_.at(static_cast<std::size_t>(k)); }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] BoundaryRule boundary() const noexcept { return rule_; }
    [[nodiscard]] double min_step() const noexcept;

    /// Flat index of (i, j); j is ignored in 1D.
    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j = 0) const noexcept { return i + j * counts_[0]; }
    [[nodiscard]] std::array<std::size_t, 2> coords(std::size_t flat) const noexcept;
    [[nodiscard]] double coordinate(int k, std::size_t i) const noexcept;
    [[nodiscard]] Point point(std::size_t flat) const noexcept;
    [[nodiscard]] bool on_boundary(std::size_t flat) const noexcept;
    /// Nearest interior node for Neumann extrapolation.
    [[nodiscard]] std::size_t inner_neighbor(std::size_t flat) const noexcept;

    /// Node whose coordinates match `x` within 1e-9 step; throws InvalidInput otherwise.
    [[nodiscard]] std::size_t node_at(const Point& x) const;
    /// Nodes at distance >= margin from every face of the box.
    [[nodiscard]] std::vector<std::size_t> nodes_within(double margin) const;

    friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) noexcept;

private:
    std::vector<Axis> axes_;
    std::vector<std::size_t> counts_;
    std::size_t size_ = 0;
    BoundaryRule rule_;
};

struct ValueField {
    SpatialGrid grid;
    std::vector<double> values;
    double time = 0.0;

    [[nodiscard]] double at(const Point& x) const { return values[grid.node_at(x)]; }
    /// Linear (1D) or bilinear (2D) interpolation; clamps outside the box.
    [[nodiscard]] double interpolate(const Point& x) const;
};

[[nodiscard]] ValueField sample(const SpatialGrid& grid, const std::function<double(const Point&)>& f,
                                double time = 0.0);

/// sup over `nodes` of |a - b|.
[[nodiscard]] double sup_distance(const ValueField& a, const ValueField& b, const std::vector<std::size_t>& nodes);

/// `x,value` or `x,y,value` rows.
[[nodiscard]] std::string field_csv(const ValueField& f);

}  // namespace nlx::hjb
