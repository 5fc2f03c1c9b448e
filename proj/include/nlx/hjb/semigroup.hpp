#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlx/hjb/hamiltonian.hpp"

namespace nlx::hjb {

/// Explicit monotone Euler steps u <- u + dt H(u) up to duration t. The step
/// actually used is t / ceil(t / dt). Refuses (NumericRefusal carrying the
/// admissible step) when dt exceeds the CFL limit; aborts on non-finite values.
[[nodiscard]] ValueField evolve(const DiscreteHamiltonian& h, const ValueField& g, double t, double dt);
[[nodiscard]] ValueField evolve(const HamiltonianSpec& spec, const ValueField& g, double t, double dt);
/// With the CFL-maximal step.
[[nodiscard]] ValueField evolve(const DiscreteHamiltonian& h, const ValueField& g, double t);

/// Distance from the faces beyond which boundary effects are negligible for a
/// solve of duration t: six standard deviations of the fastest diffusion plus
/// the distance the fastest drift travels, and two grid steps.
[[nodiscard]] double interior_margin(const DiscreteHamiltonian& h, double t);

/// Grid nodes at least `margin` from every face; throws InvalidInput when there
/// are none, so that no check passes on an empty region.
[[nodiscard]] std::vector<std::size_t> evaluation_nodes(const SpatialGrid& grid, double margin);

/// sup over the interior region of |T_{t+s} g - T_t T_s g|.
[[nodiscard]] double semigroup_residual(const DiscreteHamiltonian& h, const ValueField& g, double t, double s,
                                        double dt);

/// (T_dur f - f) / dur, with dt = min(CFL limit, dur).
[[nodiscard]] ValueField pointwise_generator(const DiscreteHamiltonian& h, const ValueField& f, double duration);

struct LevyReport {
    double translation_residual = 0.0;
    double continuity_sup = 0.0;    // sup |T_t g - g| on the interior
    double continuity_bound = 0.0;  // L_g (max|mu| t + sqrt(max|a| t))
    double lipschitz = 0.0;         // measured on the grid
    std::size_t nodes_compared = 0;
    [[nodiscard]] bool continuity_holds() const noexcept { return continuity_sup <= continuity_bound; }
};

/// Spatial homogeneity and small-time continuity of a state-independent
/// semigroup. The shift must be a whole number of grid steps per axis.
[[nodiscard]] LevyReport levy_invariants(const DiscreteHamiltonian& h, const std::function<double(const Point&)>& g,
                                         double t, const Point& shift);

struct ComparisonReport {
    double single_violation = 0.0;  // max of T1 g - T2 g over supplied g, t
    double nested_violation = 0.0;  // same for the two-time functionals
    double single_gap = 0.0;        // max |T1 g - T2 g|, for reference
    double nested_gap = 0.0;
    [[nodiscard]] bool ordered(double tol) const noexcept {
        return single_violation <= tol && nested_violation <= tol;
    }
};

using TwoTimeFunctional = std::function<double(double, double)>;

/// E[f(X_{t1}, X_{t2})] by nested evolution: for every node y the inner
/// problem z -> f(y, z) is evolved over t2 - t1 and read at y, then the
/// resulting field is evolved over t1. One dimension only.
[[nodiscard]] ValueField nested_two_time(const DiscreteHamiltonian& h, const TwoTimeFunctional& f, double t1,
                                         double t2, double dt);

/// Checks T1_t g <= T2_t g for the supplied data and the same ordering for the
/// nested functionals at (t1, t2). Both solves use the smaller CFL step.
[[nodiscard]] ComparisonReport comparison_check(const DiscreteHamiltonian& h1, const DiscreteHamiltonian& h2,
                                                const std::vector<std::function<double(const Point&)>>& gs,
                                                const std::vector<double>& ts,
                                                const std::vector<TwoTimeFunctional>& nested, double t1, double t2);

struct ConvergenceRow {
    int level = 0;
    double dx = 0.0;
    double dt = 0.0;
    double error = 0.0;
};

/// Error against a closed form at `points` for the grids produced by
/// `make_grid(dx)`, refining at a fixed dt / dx^2 ratio taken from the CFL
/// limit of the first level times `cfl_fraction`.
[[nodiscard]] std::vector<ConvergenceRow> convergence_study(
    const HamiltonianSpec& spec, const std::function<SpatialGrid(double)>& make_grid,
    const std::vector<double>& dxs, const std::function<double(const Point&)>& g,
    const std::function<double(const Point&, double)>& exact, double t, const std::vector<Point>& points,
    double cfl_fraction = 1.0);

[[nodiscard]] std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace nlx::hjb
