#include "nlx/control/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlx/core/errors.hpp"

namespace nlx::control {

bool ControlProblemSpec::cost_free() const {
    for (const auto& c : dynamics.controls)
        if (cost(c) != 0.0) return false;
    return true;
}

void validate_standing_assumption(const ControlProblemSpec& spec, double tol) {
    if (spec.dynamics.controls.empty()) throw InvalidInput("control sample is empty");
    if (!(spec.horizon > spec.t0)) throw InvalidInput("horizon must exceed the initial time");
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& c : spec.dynamics.controls) {
        const double h = spec.cost(c);
        if (!std::isfinite(h) || h < -tol) throw InvalidInput("running cost must be finite and nonnegative");
        lowest = std::min(lowest, h);
    }
    if (lowest > tol) throw InvalidInput("running cost must vanish at some sampled control");
}

namespace {

hjb::HamiltonianSpec with_cost(const ControlProblemSpec& spec) {
    hjb::HamiltonianSpec s = spec.dynamics;
    s.reward = nullptr;
    return s;
}

}  // namespace

LatticeChain::LatticeChain(const ControlProblemSpec& spec, hjb::SpatialGrid grid, double dt)
    : stencil_(with_cost(spec), std::move(grid)), dt_(dt), controls_(spec.dynamics.controls) {
    if (!(dt > 0.0)) throw InvalidInput("chain step must be positive");
    const double limit = stencil_.positivity_limit();
    if (dt > limit * (1.0 + 1e-12))
        throw NumericRefusal("chain step makes some stay probability negative", limit);
    for (const auto& c : controls_) {
        const double h = spec.cost(c);
        if (!std::isfinite(h)) throw InvalidInput("running cost is not finite");
        costs_.push_back(h);
    }
    moments_ = moment_check(*this, spec);
    if (!moments_.consistent()) throw NumericRefusal("chain is not locally consistent with the coefficients");
}

std::vector<double> LatticeChain::probabilities(std::size_t node, std::size_t control) const {
    const std::size_t k = stencil_.stencil_size();
    std::vector<double> p(k + 1, 0.0);
    if (grid().on_boundary(node)) {
        p[k] = 1.0;
        return p;
    }
    const double* w = stencil_.weights(node, control);
    double moved = 0.0;
    for (std::size_t q = 0; q < k; ++q) {
        p[q] = dt_ * w[q];
        moved += p[q];
    }
    p[k] = 1.0 - moved;
    return p;
}

double max_chain_step(const ControlProblemSpec& spec, const hjb::SpatialGrid& grid) {
    return hjb::DiscreteHamiltonian(with_cost(spec), grid).positivity_limit();
}

double chain_step_for(const ControlProblemSpec& spec, const hjb::SpatialGrid& grid, int multiple) {
    if (multiple < 1) throw InvalidInput("step multiple must be positive");
    const double span = spec.horizon - spec.t0;
    const double limit = max_chain_step(spec, grid);
    if (!std::isfinite(limit)) return span / multiple;
    const double m = static_cast<double>(multiple);
    return span / (m * std::ceil(span / (m * limit) - 1e-12));
}

MomentReport moment_check(const LatticeChain& chain, const ControlProblemSpec& spec) {
    const auto& grid = chain.grid();
    const int d = grid.dim();
    const double dt = chain.dt();
    const auto r = static_cast<std::size_t>(spec.dynamics.noise_dim);
    // Displacement of each stencil direction in coordinates.
    std::vector<Point> disp;
    const double hx = grid.axis(0).step;
    const double hy = d == 2 ? grid.axis(1).step : 0.0;
    if (d == 1) {
        disp = {{hx, 0}, {-hx, 0}};
    } else {
        disp = {{hx, 0}, {-hx, 0}, {0, hy}, {0, -hy}, {hx, hy}, {-hx, -hy}, {-hx, hy}, {hx, -hy}};
    }
    MomentReport rep;
    for (std::size_t n : chain.stencil().interior()) {
        const Point x = grid.point(n);
        for (std::size_t c = 0; c < chain.num_controls(); ++c) {
            const auto p = chain.probabilities(n, c);
            double m1[2] = {0, 0};
            double m2[2][2] = {{0, 0}, {0, 0}};
            for (std::size_t q = 0; q < disp.size(); ++q) {
                for (int i = 0; i < d; ++i) {
                    m1[i] += p[q] * disp[q][static_cast<std::size_t>(i)];
                    for (int j = 0; j < d; ++j)
                        m2[i][j] += p[q] * disp[q][static_cast<std::size_t>(i)] * disp[q][static_cast<std::size_t>(j)];
                }
            }
            const Control& lam = chain.controls()[c];
            const Point mu = spec.dynamics.drift(x, lam);
            const auto sig = spec.dynamics.volatility(x, lam);
            double allowance = 0.0;
            double mu2 = 0.0;
            double node_var = 0.0;
            for (int i = 0; i < d; ++i) {
                const double mi = mu[static_cast<std::size_t>(i)];
                rep.drift_error = std::max(rep.drift_error, std::abs(m1[i] / dt - mi));
                allowance = std::max(allowance, std::abs(mi) * grid.axis(i).step);
                mu2 = std::max(mu2, mi * mi);
            }
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double a = 0.0;
                    for (std::size_t q = 0; q < r; ++q)
                        a += sig[static_cast<std::size_t>(i) * r + q] * sig[static_cast<std::size_t>(j) * r + q];
                    const double cov = m2[i][j] - m1[i] * m1[j];
                    rep.variance_error = std::max(rep.variance_error, std::abs(cov / dt - a));
                    node_var = std::max(node_var, std::abs(cov / dt - a));
                }
            rep.variance_allowance = std::max(rep.variance_allowance, allowance + mu2 * dt);
            rep.variance_excess = std::max(rep.variance_excess, node_var - (allowance + mu2 * dt));
        }
    }
    return rep;
}

}  // namespace nlx::control
