#include <cmath>

#include "doctest.h"
#include "nlx/control/dp.hpp"
#include "nlx/core/errors.hpp"
#include "nlx/hjb/semigroup.hpp"

using namespace nlx;
using namespace nlx::control;

namespace {

ControlProblemSpec make_spec(std::vector<Control> controls, std::function<Point(const Point&, const Control&)> mu,
                             std::function<std::vector<double>(const Point&, const Control&)> sigma) {
    ControlProblemSpec s;
    s.dynamics.controls = std::move(controls);
    s.dynamics.drift = std::move(mu);
    s.dynamics.volatility = std::move(sigma);
    return s;
}

ControlProblemSpec drift_control(double cost) {
    auto s = make_spec(hjb::sample_controls(-1.0, 1.0, 17),
                       [](const Point&, const Control& c) { return Point{c[0], 0.0}; },
                       [](const Point&, const Control&) { return std::vector<double>{0.0}; });
    if (cost > 0.0) s.running_cost = [cost](const Control& c) { return cost * c[0] * c[0]; };
    return s;
}

hjb::SpatialGrid line() { return hjb::SpatialGrid::line(-3.0, 3.0, 0.05); }

double identity(const Point& p) { return p[0]; }

}  // namespace

TEST_SUITE("control") {

TEST_CASE("symmetric walk for unit noise") {
    const auto spec = make_spec({{0.0}}, [](const Point&, const Control&) { return Point{0.0, 0.0}; },
                                [](const Point&, const Control&) { return std::vector<double>{1.0}; });
    const auto grid = hjb::SpatialGrid::line(-1.0, 1.0, 0.1);
    const double dt = 0.004;
    const LatticeChain chain(spec, grid, dt);
    const auto p = chain.probabilities(10, 0);
    REQUIRE(p.size() == 3);
    // Variance dt per step: each neighbor gets dt / (2 dx^2).
    CHECK(p[0] == doctest::Approx(dt / (2.0 * 0.01)));
    CHECK(p[1] == doctest::Approx(dt / (2.0 * 0.01)));
    CHECK(p[2] == doctest::Approx(1.0 - dt / 0.01));
    CHECK(chain.moments().consistent());
    CHECK(max_chain_step(spec, grid) == doctest::Approx(0.01));
    CHECK_THROWS_AS(LatticeChain(spec, grid, 0.02), NumericRefusal);
    try {
        LatticeChain bad(spec, grid, 0.02);
    } catch (const NumericRefusal& e) {
        CHECK(e.suggestion() == doctest::Approx(0.01));
    }
    // Boundary nodes stay put.
    CHECK(chain.probabilities(0, 0).back() == 1.0);
}

TEST_CASE("pure drift is an upwind chain") {
    const auto spec = make_spec({{0.0}}, [](const Point&, const Control&) { return Point{1.0, 0.0}; },
                                [](const Point&, const Control&) { return std::vector<double>{0.0}; });
    const auto grid = hjb::SpatialGrid::line(-1.0, 1.0, 0.1);
    const LatticeChain chain(spec, grid, 0.05);
    const auto p = chain.probabilities(10, 0);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == 0.0);
    CHECK(p[2] == doctest::Approx(0.5));
    const auto m = moment_check(chain, spec);
    CHECK(m.drift_error <= 1e-12);
    CHECK(m.consistent());
}

TEST_CASE("two controlled stencils are both moment consistent") {
    const auto spec = make_spec({{1.0}, {2.0}}, [](const Point&, const Control& c) { return Point{c[0], 0.0}; },
                                [](const Point&, const Control& c) { return std::vector<double>{std::sqrt(c[0])}; });
    const auto grid = hjb::SpatialGrid::line(-1.0, 1.0, 0.1);
    const LatticeChain chain(spec, grid, max_chain_step(spec, grid));
    const auto& m = chain.moments();
    CHECK(m.drift_error <= 1e-9);
    CHECK(m.variance_excess <= 1e-9);
    CHECK(m.variance_error <= m.variance_allowance + 1e-12);
    for (std::size_t c = 0; c < 2; ++c) {
        const auto p = chain.probabilities(10, c);
        double total = 0.0;
        for (double x : p) {
            CHECK(x >= 0.0);
            total += x;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("standing assumption") {
    auto spec = drift_control(1.0);
    CHECK_NOTHROW(validate_standing_assumption(spec));
    spec.running_cost = [](const Control& c) { return c[0] * c[0] + 0.1; };
    CHECK_THROWS_AS(validate_standing_assumption(spec), InvalidInput);
    spec.running_cost = [](const Control& c) { return -c[0]; };
    CHECK_THROWS_AS(validate_standing_assumption(spec), InvalidInput);
    auto late = drift_control(0.0);
    late.t0 = 1.0;
    CHECK_THROWS_AS(validate_standing_assumption(late), InvalidInput);
}

TEST_CASE("bang-bang and quadratic-cost benchmarks") {
    const auto grid = line();
    const auto free = drift_control(0.0);
    const LatticeChain c0(free, grid, chain_step_for(free, grid, 2));
    const auto v0 = value_function(c0, free, Payoff::terminal(identity));
    CHECK(std::abs(v0.initial().at({0.0, 0.0}) - 1.0) <= 1e-2);
    for (const auto& slice : v0.policy.choice)
        CHECK(slice[grid.node_at({0.0, 0.0})] == 16);

    const auto costly = drift_control(1.0);
    const LatticeChain c1(costly, grid, chain_step_for(costly, grid, 2));
    const auto v1 = value_function(c1, costly, Payoff::terminal(identity));
    CHECK(std::abs(v1.initial().at({0.0, 0.0}) - 0.25) <= 1e-2);
    CHECK(std::abs(v1.initial().at({0.5, 0.0}) - 0.75) <= 1e-2);
    // lambda = 1/2 is a sample point (index 12 of 17 on [-1, 1]).
    CHECK(v1.policy.choice.front()[grid.node_at({0.0, 0.0})] == 12);
    CHECK(policy_csv(v1).rfind("t,x,lambda_index\n", 0) == 0);

    const auto vc = value_function(c0, free, Payoff::terminal([](const Point&) { return 2.0; }));
    for (double v : vc.initial().values) CHECK(v == 2.0);
}

TEST_CASE("dynamic programming principle") {
    const auto grid = hjb::SpatialGrid::line(-3.0, 3.0, 0.1);
    const auto spec = drift_control(1.0);
    const LatticeChain chain(spec, grid, chain_step_for(spec, grid, 2));
    const auto payoff = Payoff::terminal([](const Point& p) { return std::sin(p[0]) + 0.5 * p[0]; });
    CHECK(dpp_residual(chain, spec, payoff, spec.horizon) == 0.0);
    CHECK(dpp_residual(chain, spec, payoff, 0.5) <= 1e-12);
    const auto cyl = Payoff::cylinder({0.5, 1.0}, [](const std::vector<double>& y) { return y[0] + 0.1 * y[1] * y[1]; });
    CHECK(dpp_residual(chain, spec, cyl, 0.5) <= 1e-12);
    CHECK_THROWS_AS((void)dpp_residual(chain, spec, payoff, 1.5), InvalidInput);
}

TEST_CASE("cylinder payoffs") {
    const auto grid = hjb::SpatialGrid::line(-3.0, 3.0, 0.1);
    const auto spec = drift_control(0.0);
    const LatticeChain chain(spec, grid, chain_step_for(spec, grid, 2));
    // Depends on the horizon coordinate only: same as the terminal payoff.
    const auto a = value_function(chain, spec, Payoff::cylinder({1.0}, [](const std::vector<double>& y) { return y[0]; }));
    const auto b = value_function(chain, spec, Payoff::terminal(identity));
    CHECK(a.initial().at({0.0, 0.0}) == doctest::Approx(b.initial().at({0.0, 0.0})));
    // X_{1/2} + X_1 with full drift: 0.5 + 1.
    const auto c = value_function(chain, spec,
                                  Payoff::cylinder({0.5, 1.0}, [](const std::vector<double>& y) { return y[0] + y[1]; }));
    CHECK(c.initial().at({0.0, 0.0}) == doctest::Approx(1.5).epsilon(1e-2));
    CHECK_THROWS_AS((void)value_function(chain, spec, Payoff::cylinder({0.3333}, [](const std::vector<double>& y) {
                        return y[0];
                    })),
                    InvalidInput);
    CHECK_THROWS_AS((void)Payoff::cylinder({0.5, 0.5}, [](const std::vector<double>& y) { return y[0]; }),
                    InvalidInput);
    CHECK_THROWS_AS((void)value_function(chain, spec, Payoff::cylinder({0.25, 0.5, 0.75, 1.0},
                                                                       [](const std::vector<double>& y) { return y[0]; })),
                    InvalidInput);
}

TEST_CASE("cross-validation against the semigroup") {
    const auto grid = hjb::SpatialGrid::line(-10.0, 10.0, 0.05);
    ControlProblemSpec heat;
    heat.dynamics = hjb::g_heat(1.0, 2.0, 17);
    const auto r = cross_validate(heat, grid, [](const Point& p) { return p[0] * p[0]; });
    CHECK(r.gap <= 5e-2);
    CHECK(r.nodes > 0);
    CHECK(r.chain_dt > 0.0);
    CHECK(r.semigroup_dt > 0.0);

    ControlProblemSpec single;
    single.dynamics = hjb::g_heat(1.5, 1.5, 1);
    CHECK(cross_validate(single, grid, [](const Point& p) { return std::tanh(p[0]); }).gap <= 1e-3);
    CHECK(cross_validate(heat, grid, [](const Point&) { return 3.0; }).gap == 0.0);

    auto costly = drift_control(1.0);
    CHECK_THROWS_AS((void)cross_validate(costly, grid, identity), InvalidInput);
}

}  // TEST_SUITE
