#include <cmath>

#include "doctest.h"
#include "nlx/core/errors.hpp"
#include "nlx/hjb/semigroup.hpp"
#include "nlx/laplace/engine.hpp"
#include "nlx/lattice/measure.hpp"

using namespace nlx;
using namespace nlx::laplace;

namespace {

hjb::HamiltonianSpec unit_noise() {
    hjb::HamiltonianSpec s;
    s.controls = {{0.0}};
    s.drift = [](const Point&, const Control&) { return Point{0.0, 0.0}; };
    s.volatility = [](const Point&, const Control&) { return std::vector<double>{1.0}; };
    return s;
}

EntropicSpec payoff(std::function<double(const Point&)> f) {
    EntropicSpec s;
    s.payoff = std::move(f);
    return s;
}

EntropicSpec gaussian() {
    return payoff([](const Point& p) { return p[0]; });
}

SpatialGrid wide() { return SpatialGrid::line(-10.0, 10.0, 0.05); }

}  // namespace

TEST_SUITE("laplace") {

TEST_CASE("constants are preserved by both routes and the limit") {
    const auto family = vanishing_noise(unit_noise(), {1.0, 0.1});
    const auto c = payoff([](const Point&) { return 1.75; });
    const auto grid = SpatialGrid::line(-3.0, 3.0, 0.1);
    for (double eps : {1.0, 0.1}) {
        for (double v : entropic_risk_primal(family, c, eps, grid).values) CHECK(v == doctest::Approx(1.75));
        for (double v : entropic_risk_transformed(family, c, eps, grid).value.values)
            CHECK(v == doctest::Approx(1.75));
    }
    for (double v : deterministic_limit(family, c, grid, 0.05).value.values) CHECK(v == doctest::Approx(1.75));
}

TEST_CASE("Gaussian benchmark, primal route") {
    const auto family = vanishing_noise(unit_noise(), {1.0, 0.5, 0.1});
    for (double eps : family.schedule)
        CHECK(std::abs(entropic_risk_primal(family, gaussian(), eps, wide()).at({0.0, 0.0}) - 0.5) <= 3e-2);
    CHECK(clipping_error_bound(family, gaussian(), 1.0, wide(), {0.0, 0.0}) <= 1e-6);
}

TEST_CASE("Gaussian benchmark, transformed route down to eps = 0.01") {
    const auto family = vanishing_noise(unit_noise(), {1.0, 0.5, 0.1, 0.05, 0.01});
    for (double eps : family.schedule) {
        const auto r = entropic_risk_transformed(family, gaussian(), eps, wide());
        CHECK(std::abs(r.value.at({0.0, 0.0}) - 0.5) <= 3e-2);
        CHECK(r.a_max == doctest::Approx(2.0));
        CHECK(r.saturation <= 1e-3);
    }
}

TEST_CASE("primal route agrees with the lattice entropic expectation on one chain step") {
    const auto family = vanishing_noise(unit_noise(), {1.0});
    const auto grid = SpatialGrid::line(-2.0, 2.0, 0.1);
    const double dt = hjb::DiscreteHamiltonian(at_epsilon(family, 1.0), grid).cfl_limit();
    auto spec = payoff([](const Point& p) { return std::sin(3.0 * p[0]) + p[0]; });
    spec.horizon = dt;
    const auto field = entropic_risk_primal(family, spec, 1.0, grid, dt);
    // From x the step reaches x - dx, x, x + dx with probabilities p, 1 - 2p, p.
    const double p = dt * 0.5 / (0.1 * 0.1);
    const lattice::PathMeasure prior({p, 1.0 - 2.0 * p, p});
    for (double x : {-0.5, 0.0, 0.7}) {
        const lattice::Functional phi({spec.payoff({x - 0.1, 0.0}), spec.payoff({x, 0.0}), spec.payoff({x + 0.1, 0.0})});
        CHECK(std::abs(field.at({x, 0.0}) - lattice::entropic_expectation(prior, 1.0, phi)) <= 1e-3);
    }
}

TEST_CASE("route identity and its refinement") {
    const auto family = vanishing_noise(unit_noise(), {0.5});
    const auto smooth = payoff([](const Point& p) { return std::tanh(p[0]); });
    CHECK(route_gap(family, smooth, 0.5, SpatialGrid::line(-8.0, 8.0, 0.1)) <= 5e-2);
    // Second order in dx on the linear payoff.
    const double coarse = route_gap(family, gaussian(), 0.5, SpatialGrid::line(-8.0, 8.0, 0.1));
    const double fine = route_gap(family, gaussian(), 0.5, SpatialGrid::line(-8.0, 8.0, 0.05));
    CHECK(coarse / fine >= 3.0);
}

TEST_CASE("deterministic limit") {
    const auto family = vanishing_noise(unit_noise(), {1.0});
    const auto grid = SpatialGrid::line(-5.0, 5.0, 0.01);
    const auto r = deterministic_limit(family, gaussian(), grid, 0.02);
    CHECK(std::abs(r.value.at({0.0, 0.0}) - 0.5) <= 1e-2);
    CHECK(r.delta == doctest::Approx(0.02));

    hjb::HamiltonianSpec drift;
    drift.controls = hjb::sample_controls(-1.0, 1.0, 17);
    drift.drift = [](const Point&, const Control& c) { return Point{c[0], 0.0}; };
    drift.volatility = [](const Point&, const Control&) { return std::vector<double>{0.0}; };
    const auto d = deterministic_limit(vanishing_noise(drift, {1.0}), gaussian(), grid, 0.02);
    for (double x : {-1.0, 0.0, 1.5}) CHECK(std::abs(d.value.at({x, 0.0}) - (x + 1.0)) <= 1e-2);
}

TEST_CASE("convergence report") {
    const auto family = vanishing_noise(unit_noise(), {1.0, 0.5, 0.1, 0.05});
    const auto grid = wide();
    const auto limit_grid = SpatialGrid::line(-5.0, 5.0, 0.01);
    const auto g = convergence_report(family, gaussian(), grid, limit_grid, 0.02, {0.0, 0.0});
    REQUIRE(g.rows.size() == 4);
    for (const auto& r : g.rows) CHECK(r.gap <= 3e-2);
    CHECK(convergence_csv(g).rfind("eps,value,limit,gap\n", 0) == 0);

    const auto tanh_family = vanishing_noise(unit_noise(), {0.5, 0.05});
    const auto t = convergence_report(tanh_family, payoff([](const Point& p) { return std::tanh(p[0]); }), grid,
                                      limit_grid, 0.02, {0.0, 0.0});
    CHECK(t.rows[1].gap <= 0.5 * t.rows[0].gap);

    hjb::HamiltonianSpec still;
    still.controls = {{0.0}};
    still.drift = [](const Point&, const Control&) { return Point{0.0, 0.0}; };
    still.volatility = [](const Point&, const Control&) { return std::vector<double>{0.0}; };
    const auto sin_spec = payoff([](const Point& p) { return std::sin(p[0]); });
    const auto z = convergence_report(vanishing_noise(still, {1.0, 0.1}), sin_spec, SpatialGrid::line(-3.0, 3.0, 0.1),
                                      SpatialGrid::line(-3.0, 3.0, 0.1), 0.05, {0.5, 0.0});
    for (const auto& r : z.rows) {
        CHECK(r.value == doctest::Approx(std::sin(0.5)));
        CHECK(r.gap <= 1e-12);
    }
}

TEST_CASE("hypothesis check") {
    const auto grid = SpatialGrid::line(-1.0, 1.0, 0.1);
    const auto id = check_family(vanishing_noise(unit_noise(), {1.0, 0.5, 0.1}), grid);
    for (double d : id.distance) CHECK(d == doctest::Approx(0.0));
    CHECK(id.decreasing);

    auto family = vanishing_noise(unit_noise(), {1.0, 0.5, 0.1});
    family.drift = [](double eps, const Point&, const Control&) { return Point{eps, 0.0}; };
    const auto r = check_family(family, grid);
    CHECK(r.decreasing);
    CHECK(r.distance[0] == doctest::Approx(1.0));
    CHECK(r.distance[2] == doctest::Approx(0.1));

    family.drift = [](double eps, const Point&, const Control&) { return Point{eps < 0.2 ? 1.0 : 0.0, 0.0}; };
    CHECK_FALSE(check_family(family, grid).decreasing);
}

TEST_CASE("refusals") {
    const auto family = vanishing_noise(unit_noise(), {1.0});
    try {
        (void)entropic_risk_primal(family, gaussian(), 1e-4, wide());
        FAIL("expected a refusal");
    } catch (const NumericRefusal& e) {
        CHECK(e.suggestion() == doctest::Approx(1e-3));
    }
    CHECK_THROWS_AS((void)entropic_risk_primal(family, gaussian(), 0.0, wide()), InvalidInput);
    CHECK_THROWS_AS((void)entropic_risk_transformed(family, gaussian(), 0.5, wide(), 0.0, 0.1), NumericRefusal);
    CHECK_THROWS_AS((void)deterministic_limit(family, gaussian(), SpatialGrid::line(-5.0, 5.0, 0.05), 0.05, 0.1),
                    NumericRefusal);
    CHECK_THROWS_AS((void)entropic_risk_primal(family, gaussian(), 1.0, wide(), 1.0), NumericRefusal);
}

TEST_CASE("cash additivity and the Jensen bound") {
    const auto family = vanishing_noise(unit_noise(), {0.5});
    const auto grid = SpatialGrid::line(-6.0, 6.0, 0.1);
    const auto f = [](const Point& p) { return std::sin(p[0]) + 0.3 * p[0]; };
    const auto base = payoff(f);
    const auto shifted = payoff([&](const Point& p) { return f(p) + 1.5; });
    const auto p0 = entropic_risk_primal(family, base, 0.5, grid), p1 = entropic_risk_primal(family, shifted, 0.5, grid);
    const auto t0 = entropic_risk_transformed(family, base, 0.5, grid).value;
    const auto t1 = entropic_risk_transformed(family, shifted, 0.5, grid).value;
    const hjb::DiscreteHamiltonian heat(at_epsilon(family, 0.5), grid);
    const auto mean = hjb::evolve(heat, hjb::sample(grid, f), base.horizon);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(p1.values[i] - p0.values[i] - 1.5) <= 1e-6);
        CHECK(std::abs(t1.values[i] - t0.values[i] - 1.5) <= 1e-6);
        CHECK(p0.values[i] >= mean.values[i] - 1e-12);
    }
}

TEST_CASE("default truncation level") {
    const auto family = vanishing_noise(unit_noise(), {1.0});
    const auto grid = SpatialGrid::line(-3.0, 3.0, 0.1);
    CHECK(default_a_max(family, payoff([](const Point& p) { return 3.0 * p[0]; }), grid) == doctest::Approx(6.0));
    CHECK(default_a_max(family, payoff([](const Point&) { return 0.0; }), grid) == 1.0);
}

}  // TEST_SUITE
