#include "nlx/laplace/engine.hpp"

#include <algorithm>
#include <cmath>

#include "nlx/core/errors.hpp"
#include "nlx/hjb/semigroup.hpp"
#include "nlx/io/report.hpp"

namespace nlx::laplace {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_family(const SmallNoiseFamily& f) {
    if (f.controls.empty()) throw InvalidInput("control sample is empty");
    if (!f.drift || !f.volatility || !f.drift0 || !f.volatility0)
        throw InvalidInput("small-noise family needs drift and volatility maps and their limits");
    if (f.noise_dim < 1) throw InvalidInput("noise dimension must be positive");
}

ValueField clipped_payoff(const EntropicSpec& spec, const SpatialGrid& grid) {
    if (!spec.payoff) throw InvalidInput("entropic spec has no payoff");
    if (!(spec.horizon > 0.0)) throw InvalidInput("horizon must be positive");
    if (!(spec.clip > 0.0)) throw InvalidInput("clipping level must be positive");
    ValueField f = hjb::sample(grid, [&](const Point& x) { return std::clamp(spec.payoff(x), -spec.clip, spec.clip); });
    if (std::isfinite(spec.bound)) {
        for (double v : f.values)
            if (std::abs(v) > spec.bound + 1e-12) throw InvalidInput("payoff exceeds its declared bound on the grid");
    }
    return f;
}

double lipschitz_on_grid(const ValueField& f) {
    const auto& g = f.grid;
    double lip = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto c = g.coords(n);
        if (c[0] + 1 < g.points(0)) lip = std::max(lip, std::abs(f.values[n + 1] - f.values[n]) / g.axis(0).step);
        if (g.dim() == 2 && c[1] + 1 < g.points(1))
            lip = std::max(lip, std::abs(f.values[n + g.points(0)] - f.values[n]) / g.axis(1).step);
    }
    return lip;
}

double sup_sigma0(const SmallNoiseFamily& f, const SpatialGrid& grid) {
    double s = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n)
        for (const auto& c : f.controls)
            for (double v : f.volatility0(grid.point(n), c)) s = std::max(s, std::abs(v));
    return s;
}

std::vector<double> a_axis(double a_max, int points) {
    std::vector<double> axis;
    for (const auto& c : hjb::sample_controls(-a_max, a_max, points)) axis.push_back(c[0]);
    return axis;
}

// Controls (lambda, a) flattened as lambda ++ a; returns the split point.
std::vector<Control> product_with_a(const std::vector<Control>& lambdas, const std::vector<double>& axis, int r) {
    std::vector<std::vector<double>> axes(static_cast<std::size_t>(r), axis);
    const auto as = hjb::product_controls(axes);
    std::vector<Control> out;
    for (const auto& l : lambdas)
        for (const auto& a : as) {
            Control c = l;
            c.insert(c.end(), a.begin(), a.end());
            out.push_back(std::move(c));
        }
    return out;
}

bool saturated(const Control& c, std::size_t split, double a_max) {
    for (std::size_t i = split; i < c.size(); ++i)
        if (std::abs(c[i]) >= a_max * (1.0 - 1e-12)) return true;
    return false;
}

}  // namespace

SmallNoiseFamily vanishing_noise(const hjb::HamiltonianSpec& base, std::vector<double> schedule) {
    SmallNoiseFamily f;
    f.controls = base.controls;
    auto drift = base.drift;
    auto vol = base.volatility;
    f.drift = [drift](double, const Point& x, const Control& c) { return drift(x, c); };
    f.volatility = [vol](double eps, const Point& x, const Control& c) {
        auto s = vol(x, c);
        for (auto& v : s) v *= std::sqrt(eps);
        return s;
    };
    f.drift0 = drift;
    f.volatility0 = vol;
    f.noise_dim = base.noise_dim;
    f.schedule = std::move(schedule);
    f.bound = base.bound;
    return f;
}

hjb::HamiltonianSpec at_epsilon(const SmallNoiseFamily& family, double eps) {
    require_family(family);
    if (!(eps > 0.0)) throw InvalidInput("noise level must be positive");
    hjb::HamiltonianSpec s;
    s.controls = family.controls;
    auto drift = family.drift;
    auto vol = family.volatility;
    s.drift = [drift, eps](const Point& x, const Control& c) { return drift(eps, x, c); };
    s.volatility = [vol, eps](const Point& x, const Control& c) { return vol(eps, x, c); };
    s.noise_dim = family.noise_dim;
    s.bound = family.bound;
    return s;
}

HypothesisReport check_family(const SmallNoiseFamily& family, const SpatialGrid& grid) {
    require_family(family);
    HypothesisReport rep;
    double prev_eps = kInf;
    for (double eps : family.schedule) {
        if (!(eps > 0.0) || !(eps < prev_eps)) throw InvalidInput("noise schedule must be positive and decreasing");
        prev_eps = eps;
        double dmu = 0.0;
        double dsig = 0.0;
        for (std::size_t n = 0; n < grid.size(); ++n) {
            const Point x = grid.point(n);
            for (const auto& c : family.controls) {
                const Point a = family.drift(eps, x, c);
                const Point b = family.drift0(x, c);
                for (int i = 0; i < grid.dim(); ++i)
                    dmu = std::max(dmu, std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]));
                const auto s = family.volatility(eps, x, c);
                const auto s0 = family.volatility0(x, c);
                if (s.size() != s0.size()) throw InvalidInput("volatility and its limit differ in shape");
                for (std::size_t i = 0; i < s.size(); ++i)
                    dsig = std::max(dsig, std::abs(s[i] / std::sqrt(eps) - s0[i]));
            }
        }
        const double d = dmu + dsig;
        if (!rep.distance.empty() && d > rep.distance.back() + 1e-12) rep.decreasing = false;
        rep.eps.push_back(eps);
        rep.distance.push_back(d);
    }
    return rep;
}

ValueField entropic_risk_primal(const SmallNoiseFamily& family, const EntropicSpec& spec, double eps,
                                const SpatialGrid& grid, double dt, const Tolerances& tol) {
    if (!(eps > 0.0)) throw InvalidInput("noise level must be positive");
    if (eps < tol.primal_epsilon_floor)
        throw NumericRefusal("noise level is below the primal floor; use the transformed route",
                             tol.primal_epsilon_floor);
    const hjb::DiscreteHamiltonian h(at_epsilon(family, eps), grid);
    const ValueField phi = clipped_payoff(spec, grid);
    const double limit = h.cfl_limit();
    if (dt <= 0.0) dt = std::min(limit, spec.horizon);
    if (dt > limit * (1.0 + 1e-12)) throw NumericRefusal("time step violates the CFL bound", limit);
    const auto steps = static_cast<std::size_t>(std::ceil(spec.horizon / dt - 1e-9));
    const double step = spec.horizon / static_cast<double>(steps);

    std::vector<double> v(phi.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = phi.values[i] / eps;
    const std::vector<double> frozen = v;
    std::vector<double> next = v;
    const std::size_t k = h.stencil_size();
    const auto& offs = h.offsets();
    for (std::size_t s = 0; s < steps; ++s) {
        for (std::size_t i : h.interior()) {
            double best = -kInf;
            for (std::size_t c = 0; c < h.num_controls(); ++c) {
                const double* w = h.weights(i, c);
                double m = 0.0;
                double total = 0.0;
                for (std::size_t q = 0; q < k; ++q)
                    if (w[q] != 0.0) {
                        total += w[q];
                        m = std::max(m, v[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + offs[q])] - v[i]);
                    }
                double acc = (1.0 - step * total) * std::exp(-m);
                for (std::size_t q = 0; q < k; ++q)
                    if (w[q] != 0.0)
                        acc += step * w[q] *
                               std::exp(v[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + offs[q])] - v[i] - m);
                best = std::max(best, m + std::log(acc));
            }
            next[i] = v[i] + best;
        }
        hjb::apply_boundary(grid, next, frozen);
        v.swap(next);
        for (std::size_t i : h.interior())
            if (!std::isfinite(v[i])) throw NumericRefusal("non-finite value in the primal route");
    }
    ValueField out{grid, std::move(v), 0.0};
    for (auto& x : out.values) x *= eps;
    return out;
}

double default_a_max(const SmallNoiseFamily& family, const EntropicSpec& spec, const SpatialGrid& grid) {
    require_family(family);
    return std::max(1.0, 2.0 * lipschitz_on_grid(clipped_payoff(spec, grid)) * sup_sigma0(family, grid));
}

TransformedResult entropic_risk_transformed(const SmallNoiseFamily& family, const EntropicSpec& spec, double eps,
                                            const SpatialGrid& grid, double dt, double a_max, const Tolerances& tol) {
    require_family(family);
    if (!(eps > 0.0)) throw InvalidInput("noise level must be positive");
    if (a_max <= 0.0) a_max = default_a_max(family, spec, grid);
    const int r = family.noise_dim;
    const std::size_t split = family.controls.front().size();
    const double root = std::sqrt(eps);

    hjb::HamiltonianSpec hs;
    hs.controls = product_with_a(family.controls, a_axis(a_max, tol.a_grid_points), r);
    auto drift = family.drift;
    auto vol = family.volatility;
    const int d = grid.dim();
    hs.drift = [drift, vol, eps, root, split, r, d](const Point& x, const Control& c) {
        const Control lam(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(split));
        Point mu = drift(eps, x, lam);
        const auto s = vol(eps, x, lam);
        for (int i = 0; i < d; ++i)
            for (int q = 0; q < r; ++q)
                mu[static_cast<std::size_t>(i)] +=
                    s[static_cast<std::size_t>(i * r + q)] * c[split + static_cast<std::size_t>(q)] / root;
        return mu;
    };
    hs.volatility = [vol, eps, split](const Point& x, const Control& c) {
        return vol(eps, x, Control(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(split)));
    };
    hs.reward = [split](const Point&, const Control& c) {
        double q = 0.0;
        for (std::size_t i = split; i < c.size(); ++i) q += c[i] * c[i];
        return -0.5 * q;
    };
    hs.noise_dim = r;
    const hjb::DiscreteHamiltonian h(hs, grid);
    const double limit = h.cfl_limit();
    if (dt <= 0.0) dt = std::min(limit, spec.horizon);
    if (dt > limit * (1.0 + 1e-12)) throw NumericRefusal("time step violates the CFL bound", limit);
    const auto steps = static_cast<std::size_t>(std::ceil(spec.horizon / dt - 1e-9));
    const double step = spec.horizon / static_cast<double>(steps);

    TransformedResult out{clipped_payoff(spec, grid), a_max, 0.0};
    const std::vector<double> frozen = out.value.values;
    std::vector<double> hu;
    std::vector<std::size_t> arg;
    std::size_t hits = 0;
    std::size_t evaluations = 0;
    for (std::size_t s = 0; s < steps; ++s) {
        h.apply(out.value.values, hu, &arg);
        for (std::size_t i : h.interior()) {
            out.value.values[i] += step * hu[i];
            ++evaluations;
            if (saturated(hs.controls[arg[i]], split, a_max)) ++hits;
        }
        hjb::apply_boundary(grid, out.value.values, frozen);
        for (std::size_t i : h.interior())
            if (!std::isfinite(out.value.values[i])) throw NumericRefusal("non-finite value in the transformed route");
    }
    out.saturation = evaluations ? static_cast<double>(hits) / static_cast<double>(evaluations) : 0.0;
    if (out.saturation > tol.saturation_fraction)
        throw NumericRefusal("optimal a hits the truncation boundary on " + io::format_number(out.saturation * 100.0) +
                                 "% of evaluations; increase a_max",
                             2.0 * a_max);
    return out;
}

LimitResult deterministic_limit(const SmallNoiseFamily& family, const EntropicSpec& spec, const SpatialGrid& grid,
                                double delta, double a_max, const Tolerances& tol) {
    require_family(family);
    if (!(delta > 0.0)) throw InvalidInput("time step must be positive");
    if (a_max <= 0.0) a_max = default_a_max(family, spec, grid);
    const int r = family.noise_dim;
    const int d = grid.dim();
    const std::size_t split = family.controls.front().size();
    const auto controls = product_with_a(family.controls, a_axis(a_max, tol.a_grid_points), r);
    const auto steps = static_cast<std::size_t>(std::ceil(spec.horizon / delta - 1e-9));
    const double step = spec.horizon / static_cast<double>(steps);

    // Displacement and cost per (node, control); the dynamics do not depend on time.
    const std::size_t nc = controls.size();
    std::vector<Point> target(grid.size() * nc);
    std::vector<double> cost(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        double q = 0.0;
        for (std::size_t i = split; i < controls[c].size(); ++i) q += controls[c][i] * controls[c][i];
        cost[c] = 0.5 * step * q;
    }
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const Point x = grid.point(n);
        for (std::size_t c = 0; c < nc; ++c) {
            const Control lam(controls[c].begin(), controls[c].begin() + static_cast<std::ptrdiff_t>(split));
            Point v = family.drift0(x, lam);
            const auto s = family.volatility0(x, lam);
            if (s.size() != static_cast<std::size_t>(d * r)) throw InvalidInput("limit volatility has the wrong shape");
            for (int i = 0; i < d; ++i)
                for (int k = 0; k < r; ++k)
                    v[static_cast<std::size_t>(i)] += s[static_cast<std::size_t>(i * r + k)] * controls[c][split + static_cast<std::size_t>(k)];
            target[n * nc + c] = {x[0] + step * v[0], x[1] + step * v[1]};
        }
    }

    LimitResult out{clipped_payoff(spec, grid), a_max, 0.0, step};
    ValueField next = out.value;
    std::size_t hits = 0;
    std::size_t evaluations = 0;
    for (std::size_t s = 0; s < steps; ++s) {
        for (std::size_t n = 0; n < grid.size(); ++n) {
            double best = -kInf;
            std::size_t arg = 0;
            for (std::size_t c = 0; c < nc; ++c) {
                const double v = out.value.interpolate(target[n * nc + c]) - cost[c];
                if (v > best) {
                    best = v;
                    arg = c;
                }
            }
            next.values[n] = best;
            if (!grid.on_boundary(n)) {
                ++evaluations;
                if (saturated(controls[arg], split, a_max)) ++hits;
            }
        }
        std::swap(out.value.values, next.values);
    }
    out.saturation = evaluations ? static_cast<double>(hits) / static_cast<double>(evaluations) : 0.0;
    if (out.saturation > tol.saturation_fraction)
        throw NumericRefusal("optimal a hits the truncation boundary on " + io::format_number(out.saturation * 100.0) +
                                 "% of evaluations; increase a_max",
                             2.0 * a_max);
    return out;
}

double clipping_error_bound(const SmallNoiseFamily& family, const EntropicSpec& spec, double eps,
                            const SpatialGrid& grid, const Point& x) {
    require_family(family);
    const ValueField phi = clipped_payoff(spec, grid);
    const double lip = lipschitz_on_grid(phi);
    double c_mu = 0.0;
    double c_sig = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n)
        for (const auto& c : family.controls) {
            const Point p = grid.point(n);
            const Point mu = family.drift(eps, p, c);
            for (int i = 0; i < grid.dim(); ++i) c_mu = std::max(c_mu, std::abs(mu[static_cast<std::size_t>(i)]));
            for (double v : family.volatility(eps, p, c)) c_sig = std::max(c_sig, std::abs(v) / std::sqrt(eps));
        }
    // Under the exponentially tilted law the payoff drifts by at most
    // Lip (c_mu + c_sig^2 Lip) per unit time and spreads like Lip c_sig sqrt(eps t).
    const double t = spec.horizon;
    const double centre = std::abs(std::clamp(spec.payoff(x), -spec.clip, spec.clip)) + lip * t * (c_mu + c_sig * c_sig * lip);
    const double spread = lip * c_sig * std::sqrt(eps * t * grid.dim());
    if (spec.clip <= centre) return kInf;
    if (spread == 0.0) return 0.0;
    const double z = (spec.clip - centre) / spread;
    return 2.0 * eps * std::exp(-0.5 * z * z);
}

double route_gap(const SmallNoiseFamily& family, const EntropicSpec& spec, double eps, const SpatialGrid& grid,
                 const Tolerances& tol) {
    const ValueField p = entropic_risk_primal(family, spec, eps, grid, 0.0, tol);
    const TransformedResult q = entropic_risk_transformed(family, spec, eps, grid, 0.0, 0.0, tol);
    const hjb::DiscreteHamiltonian h(at_epsilon(family, eps), grid);
    const double margin = hjb::interior_margin(h, spec.horizon) + q.a_max * sup_sigma0(family, grid) * spec.horizon;
    return hjb::sup_distance(p, q.value, hjb::evaluation_nodes(grid, margin));
}

ConvergenceReport convergence_report(const SmallNoiseFamily& family, const EntropicSpec& spec,
                                     const SpatialGrid& grid, const SpatialGrid& limit_grid, double delta,
                                     const Point& x, const Tolerances& tol) {
    if (family.schedule.empty()) throw InvalidInput("noise schedule is empty");
    const double limit = deterministic_limit(family, spec, limit_grid, delta, 0.0, tol).value.at(x);
    ConvergenceReport rep;
    for (double eps : family.schedule) {
        const double v = entropic_risk_transformed(family, spec, eps, grid, 0.0, 0.0, tol).value.at(x);
        rep.rows.push_back({eps, v, limit, std::abs(v - limit)});
    }
    for (std::size_t i = 2; i < rep.rows.size(); ++i)
        if (rep.rows[i].gap > rep.rows[i - 1].gap + 1e-2) rep.decreasing = false;
    return rep;
}

std::string convergence_csv(const ConvergenceReport& report) {
    io::CsvTable t{{"eps", "value", "limit", "gap"}, {}};
    for (const auto& r : report.rows)
        t.add({io::format_number(r.eps), io::format_number(r.value), io::format_number(r.limit),
               io::format_number(r.gap)});
    return t.str();
}

}  // namespace nlx::laplace
