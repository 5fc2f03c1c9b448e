#include "nlx/hjb/grid.hpp"

#include <algorithm>
#include <cmath>

#include "nlx/core/errors.hpp"
#include "nlx/io/report.hpp"

namespace nlx::hjb {

BoundaryRule parse_boundary(const std::string& name) {
    if (name == "neumann") return BoundaryRule::neumann;
    if (name == "dirichlet") return BoundaryRule::dirichlet;
    throw InvalidInput("unknown boundary rule '" + name + "' (expected neumann or dirichlet)");
}

std::string to_string(BoundaryRule rule) { return rule == BoundaryRule::neumann ? "neumann" : "dirichlet"; }

SpatialGrid::SpatialGrid(std::vector<Axis> axes, BoundaryRule rule) : axes_(std::move(axes)), rule_(rule) {
    if (axes_.empty() || axes_.size() > 2) throw InvalidInput("grid dimension must be 1 or 2");
    size_ = 1;
    for (const auto& a : axes_) {
        if (!std::isfinite(a.lower) || !std::isfinite(a.upper) || !(a.upper > a.lower))
            throw InvalidInput("grid bounds must be finite with lower < upper");
        if (!(a.step > 0.0)) throw InvalidInput("grid step must be positive");
        const double cells = (a.upper - a.lower) / a.step;
        const double rounded = std::round(cells);
        if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells))
            throw InvalidInput("grid step does not divide the interval");
        const auto n = static_cast<std::size_t>(rounded) + 1;
        if (n < 10) throw InvalidInput("grid needs at least 8 interior points per axis");
        counts_.push_back(n);
        size_ *= n;
    }
}

SpatialGrid SpatialGrid::line(double lower, double upper, double step, BoundaryRule rule) {
    return SpatialGrid({Axis{lower, upper, step}}, rule);
}

SpatialGrid SpatialGrid::square(double lower, double upper, double step, BoundaryRule rule) {
    return SpatialGrid({Axis{lower, upper, step}, Axis{lower, upper, step}}, rule);
}

double SpatialGrid::min_step() const noexcept {
    double h = axes_[0].step;
    for (const auto& a : axes_) h = std::min(h, a.step);
    return h;
}

std::array<std::size_t, 2> SpatialGrid::coords(std::size_t flat) const noexcept {
    return {flat % counts_[0], dim() == 2 ? flat / counts_[0] : 0};
}

double SpatialGrid::coordinate(int k, std::size_t i) const noexcept {
    const auto& a = axes_[static_cast<std::size_t>(k)];
    return a.lower + static_cast<double>(i) * a.step;
}

Point SpatialGrid::point(std::size_t flat) const noexcept {
    const auto c = coords(flat);
    return {coordinate(0, c[0]), dim() == 2 ? coordinate(1, c[1]) : 0.0};
}

bool SpatialGrid::on_boundary(std::size_t flat) const noexcept {
    const auto c = coords(flat);
    for (int k = 0; k < dim(); ++k) {
        const auto i = c[static_cast<std::size_t>(k)];
        if (i == 0 || i + 1 == counts_[static_cast<std::size_t>(k)]) return true;
    }
    return false;
}

std::size_t SpatialGrid::inner_neighbor(std::size_t flat) const noexcept {
    auto c = coords(flat);
    for (int k = 0; k < dim(); ++k) {
        auto& i = c[static_cast<std::size_t>(k)];
        i = std::clamp<std::size_t>(i, 1, counts_[static_cast<std::size_t>(k)] - 2);
    }
    return index(c[0], c[1]);
}

std::size_t SpatialGrid::node_at(const Point& x) const {
    std::array<std::size_t, 2> c{0, 0};
    for (int k = 0; k < dim(); ++k) {
        const auto& a = axes_[static_cast<std::size_t>(k)];
        const double r = (x[static_cast<std::size_t>(k)] - a.lower) / a.step;
        const double i = std::round(r);
        if (std::abs(r - i) > 1e-9 || i < 0 || i >= static_cast<double>(counts_[static_cast<std::size_t>(k)]))
            throw InvalidInput("point is not a grid node");
        c[static_cast<std::size_t>(k)] = static_cast<std::size_t>(i);
    }
    return index(c[0], c[1]);
}

std::vector<std::size_t> SpatialGrid::nodes_within(double margin) const {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < size_; ++n) {
        const Point p = point(n);
        bool inside = !on_boundary(n);
        for (int k = 0; k < dim() && inside; ++k) {
            const auto& a = axes_[static_cast<std::size_t>(k)];
            const double x = p[static_cast<std::size_t>(k)];
            inside = x - a.lower >= margin - 1e-12 && a.upper - x >= margin - 1e-12;
        }
        if (inside) out.push_back(n);
    }
    return out;
}

bool operator==(const SpatialGrid& a, const SpatialGrid& b) noexcept {
    if (a.dim() != b.dim() || a.rule_ != b.rule_) return false;
    for (int k = 0; k < a.dim(); ++k) {
        const auto& x = a.axes_[static_cast<std::size_t>(k)];
        const auto& y = b.axes_[static_cast<std::size_t>(k)];
        if (x.lower != y.lower || x.upper != y.upper || x.step != y.step) return false;
    }
    return true;
}

double ValueField::interpolate(const Point& x) const {
    std::array<std::size_t, 2> lo{0, 0};
    std::array<double, 2> frac{0.0, 0.0};
    for (int k = 0; k < grid.dim(); ++k) {
        const auto& a = grid.axis(k);
        const std::size_t n = grid.points(k);
        const double r = std::clamp((x[static_cast<std::size_t>(k)] - a.lower) / a.step, 0.0,
                                    static_cast<double>(n - 1));
        auto i = static_cast<std::size_t>(std::floor(r));
        if (i >= n - 1) i = n - 2;
        lo[static_cast<std::size_t>(k)] = i;
        frac[static_cast<std::size_t>(k)] = r - static_cast<double>(i);
    }
    if (grid.dim() == 1) {
        const double a = values[lo[0]];
        const double b = values[lo[0] + 1];
        return a + frac[0] * (b - a);
    }
    const double f00 = values[grid.index(lo[0], lo[1])];
    const double f10 = values[grid.index(lo[0] + 1, lo[1])];
    const double f01 = values[grid.index(lo[0], lo[1] + 1)];
    const double f11 = values[grid.index(lo[0] + 1, lo[1] + 1)];
    const double fx0 = f00 + frac[0] * (f10 - f00);
    const double fx1 = f01 + frac[0] * (f11 - f01);
    return fx0 + frac[1] * (fx1 - fx0);
}

ValueField sample(const SpatialGrid& grid, const std::function<double(const Point&)>& f, double time) {
    ValueField out{grid, std::vector<double>(grid.size()), time};
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const double v = f(grid.point(n));
        if (!std::isfinite(v)) throw InvalidInput("sampled function is not finite on the grid");
        out.values[n] = v;
    }
    return out;
}

double sup_distance(const ValueField& a, const ValueField& b, const std::vector<std::size_t>& nodes) {
    if (!(a.grid == b.grid)) throw InvalidInput("fields live on different grids");
    double worst = 0.0;
    for (auto n : nodes) worst = std::max(worst, std::abs(a.values[n] - b.values[n]));
    return worst;
}

std::string field_csv(const ValueField& f) {
    io::CsvTable t;
    t.header = f.grid.dim() == 1 ? std::vector<std::string>{"x", "value"} : std::vector<std::string>{"x", "y", "value"};
    for (std::size_t n = 0; n < f.grid.size(); ++n) {
        const Point p = f.grid.point(n);
        if (f.grid.dim() == 1)
            t.add({io::format_number(p[0]), io::format_number(f.values[n])});
        else
            t.add({io::format_number(p[0]), io::format_number(p[1]), io::format_number(f.values[n])});
    }
    return t.str();
}

}  // namespace nlx::hjb
