#include <algorithm>
#include <cmath>

#include "context.hpp"
#include "nlx/core/errors.hpp"
#include "nlx/hjb/semigroup.hpp"

namespace nlx::cli {

using namespace nlx::hjb;

namespace {

double square(const Point& p) { return p[0] * p[0]; }
double neg_square(const Point& p) { return -p[0] * p[0]; }

}  // namespace

void run_heat(Context& ctx) {
    auto& b = ctx.block();
    const auto grid = ctx.line_grid("", -10.0, 10.0, 0.05);
    const auto spec = ctx.g_heat_band("", 1.0, 2.0);
    const double t = b.get_positive("t", 1.0);
    const double x = b.get_double("x", 0.0);
    const double convex_expected = b.get_double("convex_expected", 2.0);
    const double concave_expected = b.get_double("concave_expected", -1.0);
    const double value_tol = b.get_positive("value_tol", 2e-2);
    const double refine_ratio = b.get_positive("refine_ratio", 3.0);
    const double semigroup_tol = b.get_positive("semigroup_tol", 5e-2);
    const double s = b.get_positive("s", 0.5);
    const double dt_key = b.get_double("dt", 0.0);  // 0: CFL-maximal
    b.finish();
    if (dt_key < 0.0) throw InvalidInput("[heat] dt must be nonnegative");
    if (!(s < t)) throw InvalidInput("[heat] s must be smaller than t");

    const DiscreteHamiltonian h(spec, grid);
    const double dt = dt_key > 0.0 ? dt_key : h.cfl_limit();
    const auto convex = evolve(h, sample(grid, square), t, dt);
    const auto concave = evolve(h, sample(grid, neg_square), t, dt);
    ctx.at_most("heat.convex_value", std::abs(convex.at({x, 0.0}) - convex_expected), value_tol);
    ctx.at_most("heat.concave_value", std::abs(concave.at({x, 0.0}) - concave_expected), value_tol);
    ctx.write("heat_convex.csv", field_csv(convex));
    ctx.write("heat_concave.csv", field_csv(concave));

    // On x^2 the scheme is exact up to rounding, so the refinement rate is
    // measured on x^4, whose G-heat solution is x^4 + 12 t x^2 + 12 t^2 (a = 2 throughout).
    const double lo = grid.axis(0).lower, hi = grid.axis(0).upper, dx = grid.axis(0).step;
    const auto rule = grid.boundary();
    const double a_hi = h.max_diffusion();
    const auto rows = convergence_study(
        spec, [&](double step) { return SpatialGrid::line(lo, hi, step, rule); }, {dx, dx / 2.0},
        [](const Point& p) { return std::pow(p[0], 4); },
        [a_hi](const Point& p, double tt) {
            const double c = a_hi / 2.0;
            return std::pow(p[0], 4) + 12.0 * c * tt * p[0] * p[0] + 12.0 * c * c * tt * tt;
        },
        t, {{x, 0.0}});
    ctx.write("convergence.csv", convergence_csv(rows));
    ctx.above("heat.refinement_ratio", rows[0].error / rows[1].error, refine_ratio);

    ctx.at_most("heat.semigroup_residual", semigroup_residual(h, sample(grid, square), t - s, s, dt),
                semigroup_tol);
}

void run_generator_check(Context& ctx) {
    auto& b = ctx.block();
    const auto grid = ctx.line_grid("", -10.0, 10.0, 0.05);
    const auto spec = ctx.g_heat_band("", 1.0, 2.0);
    const double duration = b.get_positive("h", 1e-3);
    const double x = b.get_double("x", 0.0);
    const double tol = b.get_positive("tol", 5e-2);
    const double drift_x = b.get_double("drift_x", 1.0);
    b.finish();

    const DiscreteHamiltonian h(spec, grid);
    const auto f = sample(grid, square);
    const auto gen = pointwise_generator(h, f, duration);
    const auto ham = hamiltonian_apply(h, f);
    ctx.at_most("generator.g_heat", std::abs(gen.at({x, 0.0}) - ham.at({x, 0.0})), tol);

    // Drift uncertainty lambda in [-1, 1] with unit volatility. The upwind
    // Hamiltonian of x^2 is 2|x| + 1 + dx, so the comparison is against it.
    HamiltonianSpec band;
    band.controls = sample_controls(-1.0, 1.0, ctx.tol().lambda_samples);
    band.drift = [](const Point&, const Control& c) { return Point{c[0], 0.0}; };
    band.volatility = [](const Point&, const Control&) { return std::vector<double>{1.0}; };
    const DiscreteHamiltonian hd(band, grid);
    const auto gen_d = pointwise_generator(hd, f, duration);
    const auto ham_d = hamiltonian_apply(hd, f);
    ctx.at_most("generator.drift_band", std::abs(gen_d.at({drift_x, 0.0}) - ham_d.at({drift_x, 0.0})), tol);

    io::CsvTable table;
    table.header = {"x", "generator", "hamiltonian"};
    for (std::size_t i = 0; i < grid.size(); ++i)
        table.add({io::format_number(grid.point(i)[0]), io::format_number(gen.values[i]),
                   io::format_number(ham.values[i])});
    ctx.write("generator.csv", table.str());
}

void run_levy_invariants(Context& ctx) {
    auto& b = ctx.block();
    const auto grid = ctx.line_grid("", -10.0, 10.0, 0.05);
    const auto spec = ctx.g_heat_band("", 1.0, 2.0);
    const double shift = b.get_double("shift", 0.5);
    const double t = b.get_positive("t", 0.5);
    const double small_t = b.get_positive("small_t", 1e-3);
    const double tol = b.get_positive("translation_tol", 1e-8);
    b.finish();

    const DiscreteHamiltonian h(spec, grid);
    const auto quad = levy_invariants(h, square, t, {shift, 0.0});
    const auto smooth = levy_invariants(h, [](const Point& p) { return std::tanh(p[0]); }, small_t, {shift, 0.0});
    ctx.at_most("levy.translation", std::max(quad.translation_residual, smooth.translation_residual), tol);
    ctx.record("levy.continuity", smooth.continuity_sup, smooth.continuity_bound, smooth.continuity_holds());

    io::CsvTable table;
    table.header = {"g", "t", "translation_residual", "continuity_sup", "continuity_bound", "lipschitz", "nodes"};
    auto row = [&](const std::string& g, double tt, const LevyReport& r) {
        table.add({g, io::format_number(tt), io::format_number(r.translation_residual),
                   io::format_number(r.continuity_sup), io::format_number(r.continuity_bound),
                   io::format_number(r.lipschitz), std::to_string(r.nodes_compared)});
    };
    row("x^2", t, quad);
    row("tanh", small_t, smooth);
    ctx.write("levy.csv", table.str());
}

void run_compare(Context& ctx) {
    auto& b = ctx.block();
    const auto grid = ctx.line_grid("", -12.0, 12.0, 0.1);
    const auto narrow = ctx.g_heat_band("first_", 1.0, 1.5);
    const auto wide = ctx.g_heat_band("second_", 1.0, 2.0);
    const auto times = b.get_list("times", {0.5, 1.0});
    const double t1 = b.get_positive("t1", 0.5);
    const double t2 = b.get_positive("t2", 1.0);
    const double tol = b.get_positive("tol", 1e-10);
    b.finish();
    if (!(t1 < t2)) throw InvalidInput("[compare] t1 must be smaller than t2");

    const DiscreteHamiltonian h1(narrow, grid), h2(wide, grid);
    const std::vector<std::function<double(const Point&)>> gs = {
        square, neg_square, [](const Point& p) { return std::tanh(p[0]); },
        [](const Point& p) { return std::sin(p[0]); }};
    const std::vector<TwoTimeFunctional> nested = {
        [](double y, double z) { return y + z * z; },
        [](double y, double z) { return y * z * z; },
        [](double y, double z) { return std::cos(y - z); }};
    const auto r = comparison_check(h1, h2, gs, times, nested, t1, t2);
    ctx.at_most("compare.single", r.single_violation, tol);
    ctx.at_most("compare.nested", r.nested_violation, tol);

    io::CsvTable table;
    table.header = {"kind", "violation", "gap"};
    table.add({"single", io::format_number(r.single_violation), io::format_number(r.single_gap)});
    table.add({"nested", io::format_number(r.nested_violation), io::format_number(r.nested_gap)});
    ctx.write("compare.csv", table.str());
}

}  // namespace nlx::cli
