#include <algorithm>
#include <cmath>

#include "context.hpp"
#include "nlx/control/dp.hpp"
#include "nlx/core/errors.hpp"

namespace nlx::cli {

using namespace nlx::control;

namespace {

// dX = lambda dt with lambda in [lo, hi] and running cost c lambda^2 (c = 0: none).
ControlProblemSpec drift_control(double lo, double hi, int samples, double c, double horizon) {
    ControlProblemSpec spec;
    spec.dynamics.controls = hjb::sample_controls(lo, hi, samples);
    spec.dynamics.drift = [](const Point&, const Control& u) { return Point{u[0], 0.0}; };
    spec.dynamics.volatility = [](const Point&, const Control&) { return std::vector<double>{0.0}; };
    if (c > 0.0) spec.running_cost = [c](const Control& u) { return c * u[0] * u[0]; };
    spec.horizon = horizon;
    return spec;
}

double identity(const Point& p) { return p[0]; }

}  // namespace

void run_control(Context& ctx) {
    auto& b = ctx.block();
    const auto grid = ctx.line_grid("", -3.0, 3.0, 0.05);
    const double lo = b.get_double("lambda_lo", -1.0);
    const double hi = b.get_double("lambda_hi", 1.0);
    const int samples = b.get_int("samples", ctx.tol().lambda_samples);
    const double c = b.get_positive("cost", 1.0);
    const double horizon = b.get_positive("horizon", 1.0);
    const double quadratic_expected = b.get_double("quadratic_expected", 0.25);
    const double bang_expected = b.get_double("bang_bang_expected", 1.0);
    const double tol = b.get_positive("tol", 1e-2);
    b.finish();

    const auto quad = drift_control(lo, hi, samples, c, horizon);
    validate_standing_assumption(quad);
    const LatticeChain qchain(quad, grid, chain_step_for(quad, grid, 2));
    const auto qv = value_function(qchain, quad, Payoff::terminal(identity), ctx.tol());
    ctx.at_most("control.quadratic_cost", std::abs(qv.initial().at({0.0, 0.0}) - quadratic_expected), tol);

    const auto bang = drift_control(lo, hi, samples, 0.0, horizon);
    const LatticeChain bchain(bang, grid, chain_step_for(bang, grid));
    const auto bv = value_function(bchain, bang, Payoff::terminal(identity), ctx.tol());
    ctx.at_most("control.bang_bang", std::abs(bv.initial().at({0.0, 0.0}) - bang_expected), tol);

    const auto& m = qchain.moments();
    ctx.at_most("control.moments", std::max(m.drift_error, m.variance_excess), 1e-9);

    ctx.write("value.csv", hjb::field_csv(qv.initial()));
    ctx.write("policy.csv", policy_csv(qv));
    ctx.write("bang_bang_value.csv", hjb::field_csv(bv.initial()));
}

void run_dpp_check(Context& ctx) {
    auto& b = ctx.block();
    const auto grid = ctx.line_grid("", -3.0, 3.0, 0.05);
    const auto cyl_grid = ctx.line_grid("cylinder_", -3.0, 3.0, 0.1);
    const double c = b.get_positive("cost", 1.0);
    const double horizon = b.get_positive("horizon", 1.0);
    const double s = b.get_positive("s", 0.5);
    const double date = b.get_positive("date", 0.5);
    const double tol = b.get_positive("tol", 1e-12);
    b.finish();
    if (!(s < horizon) || date < s || date > horizon)
        throw InvalidInput("[dpp-check] need s < horizon and s <= date <= horizon");

    const auto spec = drift_control(-1.0, 1.0, ctx.tol().lambda_samples, c, horizon);
    const LatticeChain chain(spec, grid, chain_step_for(spec, grid, 2));
    const auto terminal = Payoff::terminal([](const Point& p) { return std::sin(p[0]) + 0.5 * p[0]; });
    ctx.at_most("dpp.terminal", dpp_residual(chain, spec, terminal, s), tol);

    const LatticeChain coarse(spec, cyl_grid, chain_step_for(spec, cyl_grid, 2));
    const auto cylinder =
        Payoff::cylinder({date, horizon}, [](const std::vector<double>& y) { return y[0] + 0.1 * y[1] * y[1]; });
    ctx.at_most("dpp.cylinder", dpp_residual(coarse, spec, cylinder, s), tol);

    const auto surface = value_function(chain, spec, terminal, ctx.tol());
    ctx.write("value.csv", hjb::field_csv(surface.initial()));
    ctx.write("policy.csv", policy_csv(surface));
}

void run_cross_validate(Context& ctx) {
    auto& b = ctx.block();
    const auto grid = ctx.line_grid("", -10.0, 10.0, 0.05);
    ControlProblemSpec spec;
    spec.dynamics = ctx.g_heat_band("", 1.0, 2.0);
    spec.horizon = b.get_positive("horizon", 1.0);
    const double tol = b.get_positive("tol", 5e-2);
    b.finish();

    const auto quad = cross_validate(spec, grid, [](const Point& p) { return p[0] * p[0]; });
    const auto smooth = cross_validate(spec, grid, [](const Point& p) { return std::tanh(p[0]); });
    ctx.at_most("cross.g_heat", quad.gap, tol);
    ctx.at_most("cross.g_heat_tanh", smooth.gap, tol);

    io::CsvTable table;
    table.header = {"g", "gap", "chain_dt", "semigroup_dt", "nodes"};
    for (const auto& [name, r] : {std::pair{"x^2", quad}, std::pair{"tanh", smooth}})
        table.add({name, io::format_number(r.gap), io::format_number(r.chain_dt), io::format_number(r.semigroup_dt),
                   std::to_string(r.nodes)});
    ctx.write("cross_validate.csv", table.str());
}

}  // namespace nlx::cli
