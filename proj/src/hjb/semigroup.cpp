#include "nlx/hjb/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include "nlx/core/errors.hpp"
#include "nlx/io/report.hpp"

namespace nlx::hjb {

ValueField evolve(const DiscreteHamiltonian& h, const ValueField& g, double t, double dt) {
    if (!(g.grid == h.grid())) throw InvalidInput("field does not live on the Hamiltonian's grid");
    if (!(t >= 0.0)) throw InvalidInput("duration must be nonnegative");
    ValueField u = g;
    u.time = g.time + t;
    if (t == 0.0) return u;
    if (!(dt > 0.0)) throw InvalidInput("time step must be positive");
    const double limit = h.cfl_limit();
    if (dt > limit * (1.0 + 1e-12)) throw NumericRefusal("time step violates the CFL bound", limit);
    const auto n = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
    const double step = t / static_cast<double>(n);
    std::vector<double> hu;
    for (std::size_t k = 0; k < n; ++k) {
        h.apply(u.values, hu);
        for (std::size_t i : h.interior()) u.values[i] += step * hu[i];
        apply_boundary(u.grid, u.values, g.values);
        for (std::size_t i : h.interior())
            if (!std::isfinite(u.values[i])) throw NumericRefusal("non-finite value during time stepping");
    }
    return u;
}

ValueField evolve(const HamiltonianSpec& spec, const ValueField& g, double t, double dt) {
    return evolve(DiscreteHamiltonian(spec, g.grid), g, t, dt);
}

ValueField evolve(const DiscreteHamiltonian& h, const ValueField& g, double t) {
    return evolve(h, g, t, std::min(h.cfl_limit(), std::max(t, 1e-300)));
}

double interior_margin(const DiscreteHamiltonian& h, double t) {
    return 6.0 * std::sqrt(h.max_diffusion() * t) + h.max_drift() * t + 2.0 * h.grid().min_step();
}

std::vector<std::size_t> evaluation_nodes(const SpatialGrid& grid, double margin) {
    auto nodes = grid.nodes_within(margin);
    if (nodes.empty())
        throw InvalidInput("grid too small: no node lies " + io::format_number(margin) + " away from the boundary");
    return nodes;
}

double semigroup_residual(const DiscreteHamiltonian& h, const ValueField& g, double t, double s, double dt) {
    const ValueField direct = evolve(h, g, t + s, dt);
    const ValueField staged = evolve(h, evolve(h, g, s, dt), t, dt);
    return sup_distance(direct, staged, evaluation_nodes(h.grid(), interior_margin(h, t + s)));
}

ValueField pointwise_generator(const DiscreteHamiltonian& h, const ValueField& f, double duration) {
    if (!(duration > 0.0)) throw InvalidInput("generator duration must be positive");
    const ValueField moved = evolve(h, f, duration, std::min(h.cfl_limit(), duration));
    ValueField out{f.grid, std::vector<double>(f.values.size()), f.time};
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = (moved.values[i] - f.values[i]) / duration;
    return out;
}

LevyReport levy_invariants(const DiscreteHamiltonian& h, const std::function<double(const Point&)>& g, double t,
                           const Point& shift) {
    if (!h.state_independent()) throw InvalidInput("Levy invariants need state-independent coefficients");
    const SpatialGrid& grid = h.grid();
    std::array<std::ptrdiff_t, 2> steps{0, 0};
    for (int k = 0; k < grid.dim(); ++k) {
        const double r = shift[static_cast<std::size_t>(k)] / grid.axis(k).step;
        if (std::abs(r - std::round(r)) > 1e-9) throw InvalidInput("shift must be a whole number of grid steps");
        steps[static_cast<std::size_t>(k)] = static_cast<std::ptrdiff_t>(std::round(r));
    }
    const ValueField base = sample(grid, g);
    const ValueField moved = sample(grid, [&](const Point& x) { return g({x[0] + shift[0], x[1] + shift[1]}); });
    const ValueField tb = evolve(h, base, t);
    const ValueField tm = evolve(h, moved, t);

    LevyReport rep;
    const double margin = interior_margin(h, t);
    const auto inner = evaluation_nodes(grid, margin + std::max(std::abs(shift[0]), std::abs(shift[1])));
    for (std::size_t n : inner) {
        const auto c = grid.coords(n);
        const auto i = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(c[0]) + steps[0]);
        const auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(c[1]) + steps[1]);
        const std::size_t m = grid.index(i, grid.dim() == 2 ? j : 0);
        rep.translation_residual = std::max(rep.translation_residual, std::abs(tm.values[n] - tb.values[m]));
        ++rep.nodes_compared;
    }

    // Lipschitz constant of g on the grid (sup-norm of finite differences).
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const auto c = grid.coords(n);
        if (c[0] + 1 < grid.points(0))
            rep.lipschitz = std::max(rep.lipschitz, std::abs(base.values[n + 1] - base.values[n]) / grid.axis(0).step);
        if (grid.dim() == 2 && c[1] + 1 < grid.points(1))
            rep.lipschitz = std::max(rep.lipschitz, std::abs(base.values[n + grid.points(0)] - base.values[n]) /
                                                        grid.axis(1).step);
    }
    for (std::size_t n : evaluation_nodes(grid, margin))
        rep.continuity_sup = std::max(rep.continuity_sup, std::abs(tb.values[n] - base.values[n]));
    const double dims = grid.dim() == 2 ? std::sqrt(2.0) : 1.0;
    rep.continuity_bound = dims * rep.lipschitz * (h.max_drift() * t + std::sqrt(grid.dim() * h.max_diffusion() * t));
    return rep;
}

ValueField nested_two_time(const DiscreteHamiltonian& h, const TwoTimeFunctional& f, double t1, double t2,
                           double dt) {
    const SpatialGrid& grid = h.grid();
    if (grid.dim() != 1) throw InvalidInput("nested two-time functionals are implemented in one dimension");
    if (!(t2 >= t1 && t1 >= 0.0)) throw InvalidInput("need 0 <= t1 <= t2");
    ValueField w{grid, std::vector<double>(grid.size()), 0.0};
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const double y = grid.point(n)[0];
        const ValueField inner = sample(grid, [&](const Point& z) { return f(y, z[0]); });
        w.values[n] = evolve(h, inner, t2 - t1, dt).values[n];
    }
    return evolve(h, w, t1, dt);
}

ComparisonReport comparison_check(const DiscreteHamiltonian& h1, const DiscreteHamiltonian& h2,
                                  const std::vector<std::function<double(const Point&)>>& gs,
                                  const std::vector<double>& ts, const std::vector<TwoTimeFunctional>& nested,
                                  double t1, double t2) {
    if (!(h1.grid() == h2.grid())) throw InvalidInput("comparison needs a shared grid");
    const SpatialGrid& grid = h1.grid();
    const double dt = std::min(h1.cfl_limit(), h2.cfl_limit());
    const double margin = std::max(interior_margin(h1, t2), interior_margin(h2, t2));
    ComparisonReport rep;
    auto compare = [&](const ValueField& a, const ValueField& b, const std::vector<std::size_t>& nodes,
                       double& violation, double& gap) {
        for (std::size_t n : nodes) {
            violation = std::max(violation, a.values[n] - b.values[n]);
            gap = std::max(gap, std::abs(a.values[n] - b.values[n]));
        }
    };
    for (const auto& g : gs) {
        const ValueField g0 = sample(grid, g);
        for (double t : ts) {
            const auto nodes = evaluation_nodes(grid, std::max(interior_margin(h1, t), interior_margin(h2, t)));
            compare(evolve(h1, g0, t, dt), evolve(h2, g0, t, dt), nodes, rep.single_violation, rep.single_gap);
        }
    }
    const auto nodes = evaluation_nodes(grid, margin);
    for (const auto& f : nested)
        compare(nested_two_time(h1, f, t1, t2, dt), nested_two_time(h2, f, t1, t2, dt), nodes, rep.nested_violation,
                rep.nested_gap);
    return rep;
}

std::vector<ConvergenceRow> convergence_study(const HamiltonianSpec& spec,
                                              const std::function<SpatialGrid(double)>& make_grid,
                                              const std::vector<double>& dxs,
                                              const std::function<double(const Point&)>& g,
                                              const std::function<double(const Point&, double)>& exact, double t,
                                              const std::vector<Point>& points, double cfl_fraction) {
    if (dxs.empty()) throw InvalidInput("convergence study needs at least one level");
    if (!(cfl_fraction > 0.0 && cfl_fraction <= 1.0)) throw InvalidInput("CFL fraction must lie in (0, 1]");
    std::vector<ConvergenceRow> rows;
    double ratio = 0.0;
    for (std::size_t level = 0; level < dxs.size(); ++level) {
        const double dx = dxs[level];
        const DiscreteHamiltonian h(spec, make_grid(dx));
        if (level == 0) ratio = cfl_fraction * h.cfl_limit() / (dx * dx);
        const double dt = std::min(ratio * dx * dx, h.cfl_limit());
        const ValueField u = evolve(h, sample(h.grid(), g), t, dt);
        double err = 0.0;
        for (const auto& p : points) err = std::max(err, std::abs(u.at(p) - exact(p, t)));
        rows.push_back({static_cast<int>(level), dx, dt, err});
    }
    return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
    io::CsvTable t{{"level", "dx", "dt", "error"}, {}};
    for (const auto& r : rows)
        t.add({std::to_string(r.level), io::format_number(r.dx), io::format_number(r.dt), io::format_number(r.error)});
    return t.str();
}

}  // namespace nlx::hjb
