#include <algorithm>
#include <cmath>

#include "context.hpp"
#include "nlx/core/errors.hpp"
#include "nlx/laplace/engine.hpp"

namespace nlx::cli {

using namespace nlx::laplace;

namespace {

hjb::HamiltonianSpec unit_noise() {
    hjb::HamiltonianSpec base;
    base.controls = {{0.0}};
    base.drift = [](const Point&, const Control&) { return Point{0.0, 0.0}; };
    base.volatility = [](const Point&, const Control&) { return std::vector<double>{1.0}; };
    return base;
}

std::string eps_tag(double eps) { return io::format_number(eps); }

}  // namespace

void run_laplace(Context& ctx) {
    auto& b = ctx.block();
    const auto grid = ctx.line_grid("", -10.0, 10.0, 0.05);
    const auto limit_grid = ctx.line_grid("limit_", -5.0, 5.0, 0.01);
    const auto schedule = b.get_list("schedule", {1.0, 0.5, 0.1, 0.05});
    const double horizon = b.get_positive("horizon", 1.0);
    const double clip = b.get_positive("clip", 20.0);
    const double delta = b.get_positive("limit_delta", 0.02);
    const double value_tol = b.get_positive("value_tol", 3e-2);
    const double limit_tol = b.get_positive("limit_tol", 1e-2);
    const double route_eps = b.get_positive("route_eps", 0.5);
    const double route_tol = b.get_positive("route_tol", 5e-2);
    const double route_ratio = b.get_positive("route_ratio", 3.0);
    const double tanh_eps_coarse = b.get_positive("tanh_eps_coarse", 0.5);
    const double tanh_eps_fine = b.get_positive("tanh_eps_fine", 0.05);
    const double tanh_ratio = b.get_positive("tanh_ratio", 0.5);
    const double clip_tol = b.get_positive("clip_tol", 1e-6);
    b.finish();
    if (schedule.empty()) throw InvalidInput("[laplace] schedule must not be empty");
    const auto has = [&](double e) { return std::find(schedule.begin(), schedule.end(), e) != schedule.end(); };
    if (!has(tanh_eps_coarse) || !has(tanh_eps_fine))
        throw InvalidInput("[laplace] tanh_eps_coarse and tanh_eps_fine must be on the schedule");
    const auto& tol = ctx.tol();
    const Point origin{0.0, 0.0};

    const auto family = vanishing_noise(unit_noise(), schedule);
    const auto hyp = check_family(family, grid);
    ctx.record("laplace.hypothesis", hyp.distance.empty() ? 0.0 : hyp.distance.back(), 0.0, hyp.decreasing);

    // Gaussian benchmark: phi = clip(x); E^eps = x + T/2 for every eps.
    EntropicSpec linear;
    linear.horizon = horizon;
    linear.clip = clip;
    linear.payoff = [clip](const Point& p) { return std::clamp(p[0], -clip, clip); };
    const double exact = horizon / 2.0;

    io::CsvTable gauss;
    gauss.header = {"eps", "primal", "transformed", "a_max", "saturation", "clipping_bound"};
    double worst_clip = 0.0;
    for (const double eps : schedule) {
        const auto primal = entropic_risk_primal(family, linear, eps, grid, 0.0, tol);
        const auto trans = entropic_risk_transformed(family, linear, eps, grid, 0.0, 0.0, tol);
        const double p0 = primal.at(origin), q0 = trans.value.at(origin);
        ctx.at_most("laplace.primal_eps_" + eps_tag(eps), std::abs(p0 - exact), value_tol);
        ctx.at_most("laplace.transformed_eps_" + eps_tag(eps), std::abs(q0 - exact), value_tol);
        const double cb = clipping_error_bound(family, linear, eps, grid, origin);
        worst_clip = std::max(worst_clip, cb);
        gauss.add({eps_tag(eps), io::format_number(p0), io::format_number(q0), io::format_number(trans.a_max),
                   io::format_number(trans.saturation), io::format_number(cb)});
        ctx.write("field_primal_eps_" + eps_tag(eps) + ".csv", hjb::field_csv(primal));
        ctx.write("field_transformed_eps_" + eps_tag(eps) + ".csv", hjb::field_csv(trans.value));
    }
    ctx.write("gaussian.csv", gauss.str());
    ctx.at_most("laplace.clipping_bound", worst_clip, clip_tol);

    const auto lim = deterministic_limit(family, linear, limit_grid, delta, 0.0, tol);
    ctx.at_most("laplace.limit", std::abs(lim.value.at(origin) - exact), limit_tol);
    ctx.write("field_limit.csv", hjb::field_csv(lim.value));

    // Pure drift uncertainty: mu0 = lambda in [-1, 1], no noise in the limit, value x + T.
    {
        SmallNoiseFamily drift;
        drift.controls = hjb::sample_controls(-1.0, 1.0, tol.lambda_samples);
        drift.drift = [](double, const Point&, const Control& c) { return Point{c[0], 0.0}; };
        drift.volatility = [](double, const Point&, const Control&) { return std::vector<double>{0.0}; };
        drift.drift0 = [](const Point&, const Control& c) { return Point{c[0], 0.0}; };
        drift.volatility0 = [](const Point&, const Control&) { return std::vector<double>{0.0}; };
        drift.schedule = schedule;
        const auto r = deterministic_limit(drift, linear, limit_grid, delta, 0.0, tol);
        ctx.at_most("laplace.drift_limit", std::abs(r.value.at(origin) - horizon), limit_tol);
    }

    const double gap = route_gap(family, linear, route_eps, grid, tol);
    const auto& ax = grid.axis(0);
    const auto fine = hjb::SpatialGrid::line(ax.lower, ax.upper, ax.step / 2.0, grid.boundary());
    const double gap_fine = route_gap(family, linear, route_eps, fine, tol);
    ctx.at_most("laplace.route_gap", gap, route_tol);
    ctx.above("laplace.route_gap_ratio", gap / gap_fine, route_ratio);
    {
        io::CsvTable t;
        t.header = {"eps", "dx", "gap"};
        t.add({eps_tag(route_eps), io::format_number(ax.step), io::format_number(gap)});
        t.add({eps_tag(route_eps), io::format_number(ax.step / 2.0), io::format_number(gap_fine)});
        ctx.write("route_gap.csv", t.str());
    }

    // tanh benchmark: the gap to the deterministic limit shrinks with eps.
    EntropicSpec smooth;
    smooth.horizon = horizon;
    smooth.clip = clip;
    smooth.bound = 1.0;
    smooth.payoff = [](const Point& p) { return std::tanh(p[0]); };
    const auto report = convergence_report(family, smooth, grid, limit_grid, delta, origin, tol);
    ctx.write("convergence.csv", convergence_csv(report));
    double coarse_gap = 0.0, fine_gap = 0.0;
    for (const auto& row : report.rows) {
        if (row.eps == tanh_eps_coarse) coarse_gap = row.gap;
        if (row.eps == tanh_eps_fine) fine_gap = row.gap;
    }
    ctx.at_most("laplace.tanh_ratio", fine_gap / coarse_gap, tanh_ratio);
}

}  // namespace nlx::cli
