#include "nlx/control/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlx/core/errors.hpp"
#include "nlx/hjb/semigroup.hpp"
#include "nlx/io/report.hpp"

namespace nlx::control {

struct PayoffAccess {
    static const auto& terminal(const Payoff& p) { return p.terminal_; }
    static const auto& field(const Payoff& p) { return p.field_; }
    static const auto& cylinder(const Payoff& p) { return p.cylinder_; }
};

Payoff Payoff::terminal(std::function<double(const Point&)> f) {
    if (!f) throw InvalidInput("terminal payoff is empty");
    Payoff p;
    p.terminal_ = std::move(f);
    return p;
}

Payoff Payoff::field(hjb::ValueField f) {
    Payoff p;
    p.field_ = std::move(f);
    return p;
}

Payoff Payoff::cylinder(std::vector<double> dates, std::function<double(const std::vector<double>&)> f) {
    if (!f) throw InvalidInput("cylinder payoff is empty");
    if (dates.empty()) throw InvalidInput("cylinder payoff needs at least one monitoring date");
    for (std::size_t i = 1; i < dates.size(); ++i)
        if (!(dates[i] > dates[i - 1])) throw InvalidInput("monitoring dates must increase strictly");
    Payoff p;
    p.dates_ = std::move(dates);
    p.cylinder_ = std::move(f);
    return p;
}

namespace {

std::size_t grid_step_index(double t, double t0, double dt, const char* what) {
    const double r = (t - t0) / dt;
    const double k = std::round(r);
    if (std::abs(r - k) > 1e-9 * std::max(1.0, std::abs(r)) || k < 0)
        throw InvalidInput(std::string(what) + " is not on the chain's time grid");
    return static_cast<std::size_t>(k);
}

// One backward step on every block of `n` nodes.
void dp_step(const LatticeChain& chain, const std::vector<double>& next, std::vector<double>& out,
             std::vector<std::uint32_t>* policy, const std::vector<double>& frozen) {
    const auto& grid = chain.grid();
    const auto& st = chain.stencil();
    const std::size_t n = grid.size();
    const std::size_t blocks = next.size() / n;
    const std::size_t k = st.stencil_size();
    const auto& offs = st.offsets();
    const double dt = chain.dt();
    const auto& costs = chain.costs();
    out.resize(next.size());
    if (policy) policy->assign(n, 0);
    std::vector<double> p_w(k);
    for (std::size_t b = 0; b < blocks; ++b) {
        const double* v = &next[b * n];
        double* o = &out[b * n];
        for (std::size_t i : st.interior()) {
            double best = -std::numeric_limits<double>::infinity();
            std::uint32_t arg = 0;
            for (std::size_t c = 0; c < chain.num_controls(); ++c) {
                const double* w = st.weights(i, c);
                double moved = 0.0;
                double acc = -costs[c] * dt;
                for (std::size_t q = 0; q < k; ++q) {
                    if (w[q] == 0.0) continue;
                    const double p = dt * w[q];
                    moved += p;
                    acc += p * v[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + offs[q])];
                }
                acc += (1.0 - moved) * v[i];
                if (acc > best) {
                    best = acc;
                    arg = static_cast<std::uint32_t>(c);
                }
            }
            o[i] = best;
            if (policy && b == 0) (*policy)[i] = arg;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!grid.on_boundary(i)) continue;
            if (grid.boundary() == hjb::BoundaryRule::neumann) {
                o[i] = o[grid.inner_neighbor(i)];
                if (policy && b == 0) (*policy)[i] = (*policy)[grid.inner_neighbor(i)];
            } else {
                o[i] = frozen[b * n + i];
            }
        }
    }
}

}  // namespace

ValueSurface value_function(const LatticeChain& chain, const ControlProblemSpec& spec, const Payoff& payoff,
                            const Tolerances& tol) {
    if (!(spec.horizon > spec.t0)) throw InvalidInput("horizon must exceed the initial time");
    const auto& grid = chain.grid();
    const std::size_t n = grid.size();
    const double dt = chain.dt();
    const std::size_t steps = grid_step_index(spec.horizon, spec.t0, dt, "horizon");
    if (steps == 0) throw InvalidInput("horizon is shorter than one chain step");

    const auto& dates = payoff.dates();
    if (dates.size() > static_cast<std::size_t>(tol.max_monitoring_dates))
        throw InvalidInput("cylinder payoffs take at most " + std::to_string(tol.max_monitoring_dates) +
                           " monitoring dates");
    std::vector<std::size_t> date_steps;
    for (double s : dates) {
        if (s < spec.t0 - 1e-12 || s > spec.horizon + 1e-12) throw InvalidInput("monitoring date outside the horizon");
        date_steps.push_back(grid_step_index(s, spec.t0, dt, "monitoring date"));
    }
    if (!date_steps.empty() && grid.dim() != 1) throw InvalidInput("cylinder payoffs are implemented in one dimension");

    // Terminal slice, possibly augmented with the coordinates recorded before the horizon.
    std::size_t recorded = date_steps.size();
    const bool last_at_horizon = !date_steps.empty() && date_steps.back() == steps;
    if (last_at_horizon) --recorded;
    double entries = static_cast<double>(n);
    for (std::size_t r = 0; r < recorded; ++r) entries *= static_cast<double>(n);
    if (entries > tol.augmented_state_limit)
        throw NumericRefusal("augmented state would need " + io::format_number(entries) + " entries");

    std::vector<double> v(static_cast<std::size_t>(entries));
    if (const auto& f = PayoffAccess::field(payoff)) {
        if (!(f->grid == grid)) throw InvalidInput("terminal field does not live on the chain's grid");
        v = f->values;
    } else if (const auto& g = PayoffAccess::terminal(payoff)) {
        for (std::size_t i = 0; i < n; ++i) v[i] = g(grid.point(i));
    } else {
        const auto& f2 = PayoffAccess::cylinder(payoff);
        std::vector<double> coords(dates.size());
        for (std::size_t flat = 0; flat < v.size(); ++flat) {
            std::size_t rest = flat / n;
            for (std::size_t r = 0; r < recorded; ++r) {
                coords[r] = grid.coordinate(0, rest % n);
                rest /= n;
            }
            if (last_at_horizon) coords.back() = grid.coordinate(0, flat % n);
            v[flat] = f2(coords);
        }
    }
    for (double x : v)
        if (!std::isfinite(x)) throw InvalidInput("terminal payoff is not finite on the grid");

    ValueSurface out;
    std::vector<hjb::ValueField> reversed;
    std::vector<std::vector<std::uint32_t>> reversed_policy;
    std::vector<double> reversed_times;
    auto store = [&](std::size_t k, const std::vector<std::uint32_t>* pol) {
        reversed.push_back(hjb::ValueField{grid, v, spec.t0 + static_cast<double>(k) * dt});
        if (pol) {
            reversed_policy.push_back(*pol);
            reversed_times.push_back(spec.t0 + static_cast<double>(k) * dt);
        }
    };
    auto collapse = [&]() {
        // Drop the most recently recorded coordinate by setting it to x.
        const std::size_t inner = v.size() / (n * n);
        std::vector<double> c(v.size() / n);
        for (std::size_t y = 0; y < inner; ++y)
            for (std::size_t x = 0; x < n; ++x) c[x + n * y] = v[x + n * (y + inner * x)];
        v = std::move(c);
        --recorded;
    };

    std::vector<double> frozen = v;
    std::size_t next_date = recorded;  // index into date_steps of the next date to collapse, counting down
    if (recorded == 0) store(steps, nullptr);
    std::vector<double> buf;
    std::vector<std::uint32_t> pol;
    for (std::size_t k = steps; k-- > 0;) {
        const bool keep = recorded == 0;
        dp_step(chain, v, buf, keep ? &pol : nullptr, frozen);
        v.swap(buf);
        if (next_date > 0 && date_steps[next_date - 1] == k) {
            collapse();
            --next_date;
            frozen = v;
        }
        if (recorded == 0) store(k, keep ? &pol : nullptr);
    }
    for (auto x : v)
        if (!std::isfinite(x)) throw NumericRefusal("non-finite value in the dynamic program");

    // Slices produced from an augmented slice carry no policy row.
    std::reverse(reversed.begin(), reversed.end());
    std::reverse(reversed_policy.begin(), reversed_policy.end());
    std::reverse(reversed_times.begin(), reversed_times.end());
    out.slices = std::move(reversed);
    out.policy.times = std::move(reversed_times);
    out.policy.choice = std::move(reversed_policy);
    return out;
}

std::string policy_csv(const ValueSurface& surface) {
    io::CsvTable t;
    if (surface.slices.empty()) return t.str();
    const auto& grid = surface.slices.front().grid;
    t.header = grid.dim() == 1 ? std::vector<std::string>{"t", "x", "lambda_index"}
                               : std::vector<std::string>{"t", "x", "y", "lambda_index"};
    for (std::size_t s = 0; s < surface.policy.times.size(); ++s)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Point p = grid.point(i);
            std::vector<std::string> row{io::format_number(surface.policy.times[s]), io::format_number(p[0])};
            if (grid.dim() == 2) row.push_back(io::format_number(p[1]));
            row.push_back(std::to_string(surface.policy.choice[s][i]));
            t.add(std::move(row));
        }
    return t.str();
}

double dpp_residual(const LatticeChain& chain, const ControlProblemSpec& spec, const Payoff& payoff, double s) {
    if (!(s > spec.t0 - 1e-12 && s <= spec.horizon + 1e-12)) throw InvalidInput("intermediate time outside the horizon");
    for (double d : payoff.dates())
        if (d < s - 1e-12) throw InvalidInput("monitoring dates must not precede the intermediate time");
    const ValueSurface surface = value_function(chain, spec, payoff);
    const hjb::ValueField& direct = surface.initial();
    std::vector<std::size_t> all(direct.grid.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

    hjb::ValueField mid = surface.slices.back();  // V_T when s is the horizon
    if (s < spec.horizon - 1e-12) {
        ControlProblemSpec late = spec;
        late.t0 = s;
        mid = value_function(chain, late, payoff).initial();
    }
    if (s <= spec.t0 + 1e-12) return hjb::sup_distance(direct, mid, all);
    ControlProblemSpec early = spec;
    early.horizon = s;
    return hjb::sup_distance(direct, value_function(chain, early, Payoff::field(mid)).initial(), all);
}

CrossValidation cross_validate(const ControlProblemSpec& spec, const hjb::SpatialGrid& grid,
                               const std::function<double(const Point&)>& g) {
    if (!spec.cost_free()) throw InvalidInput("cross-validation needs a zero running cost");
    CrossValidation out;
    out.chain_dt = chain_step_for(spec, grid);
    const LatticeChain chain(spec, grid, out.chain_dt);
    const hjb::ValueField lattice = value_function(chain, spec, Payoff::terminal(g)).initial();

    const hjb::DiscreteHamiltonian h(spec.dynamics, grid);
    const double t = spec.horizon - spec.t0;
    out.semigroup_dt = std::min(h.cfl_limit(), t);
    const hjb::ValueField semi = hjb::evolve(h, hjb::sample(grid, g), t, out.semigroup_dt);
    const auto nodes = hjb::evaluation_nodes(grid, hjb::interior_margin(h, t));
    out.nodes = nodes.size();
    out.gap = hjb::sup_distance(lattice, semi, nodes);
    return out;
}

}  // namespace nlx::control
