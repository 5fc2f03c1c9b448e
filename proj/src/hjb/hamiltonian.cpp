#include "nlx/hjb/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "nlx/core/errors.hpp"

namespace nlx::hjb {

std::vector<Control> sample_controls(double lower, double upper, int samples) {
    if (samples < 1) throw InvalidInput("control sample needs at least one point");
    if (upper < lower) throw InvalidInput("control interval is empty");
    std::vector<Control> out;
    if (samples == 1 || upper == lower) return {Control{lower}};
    for (int k = 0; k < samples; ++k)
        out.push_back({lower + (upper - lower) * static_cast<double>(k) / static_cast<double>(samples - 1)});
    return out;
}

std::vector<Control> product_controls(const std::vector<std::vector<double>>& axes) {
    std::vector<Control> out{Control{}};
    for (const auto& axis : axes) {
        if (axis.empty()) throw InvalidInput("empty control axis");
        std::vector<Control> next;
        for (const auto& c : out)
            for (double v : axis) {
                Control d = c;
                d.push_back(v);
                next.push_back(std::move(d));
            }
        out = std::move(next);
    }
    return out;
}

HamiltonianSpec g_heat(double a_lo, double a_hi, int samples) {
    if (!(a_lo >= 0.0)) throw InvalidInput("volatility band must be nonnegative");
    HamiltonianSpec s;
    s.controls = sample_controls(a_lo, a_hi, samples);
    s.drift = [](const Point&, const Control&) { return Point{0.0, 0.0}; };
    s.volatility = [](const Point&, const Control& c) { return std::vector<double>{std::sqrt(c[0])}; };
    s.noise_dim = 1;
    return s;
}

DiscreteHamiltonian::DiscreteHamiltonian(const HamiltonianSpec& spec, SpatialGrid grid) : grid_(std::move(grid)) {
    if (spec.controls.empty()) throw InvalidInput("control sample is empty");
    if (!spec.drift || !spec.volatility) throw InvalidInput("drift and volatility must be given");
    if (spec.noise_dim < 1) throw InvalidInput("noise dimension must be positive");
    const int d = grid_.dim();
    const auto r = static_cast<std::size_t>(spec.noise_dim);
    controls_ = spec.controls.size();
    const std::size_t n0 = grid_.points(0);
    const double hx = grid_.axis(0).step;
    const double hy = d == 2 ? grid_.axis(1).step : 1.0;
    if (d == 1) {
        offsets_ = {1, -1};
    } else {
        const auto s = static_cast<std::ptrdiff_t>(n0);
        offsets_ = {1, -1, s, -s, s + 1, -s - 1, s - 1, -s + 1};
    }
    const std::size_t k = offsets_.size();
    weights_.assign(grid_.size() * controls_ * k, 0.0);
    if (spec.reward) rewards_.assign(grid_.size() * controls_, 0.0);

    std::vector<double> first_w;
    std::vector<double> first_r;
    bool have_first = false;
    for (std::size_t n = 0; n < grid_.size(); ++n) {
        if (grid_.on_boundary(n)) continue;
        interior_.push_back(n);
        const Point x = grid_.point(n);
        for (std::size_t c = 0; c < controls_; ++c) {
            const Control& lam = spec.controls[c];
            const Point mu = spec.drift(x, lam);
            const std::vector<double> sig = spec.volatility(x, lam);
            if (sig.size() != static_cast<std::size_t>(d) * r)
                throw InvalidInput("volatility has the wrong shape");
            for (int i = 0; i < d; ++i) {
                if (!std::isfinite(mu[static_cast<std::size_t>(i)])) throw InvalidInput("drift is not finite");
                if (std::abs(mu[static_cast<std::size_t>(i)]) > spec.bound)
                    throw InvalidInput("drift exceeds the declared bound");
            }
            for (double v : sig) {
                if (!std::isfinite(v)) throw InvalidInput("volatility is not finite");
                if (std::abs(v) > spec.bound) throw InvalidInput("volatility exceeds the declared bound");
            }
            // a = sigma sigma^T
            double a[2][2] = {{0, 0}, {0, 0}};
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (std::size_t q = 0; q < r; ++q)
                        a[i][j] += sig[static_cast<std::size_t>(i) * r + q] * sig[static_cast<std::size_t>(j) * r + q];
            double* w = &weights_[(n * controls_ + c) * k];
            const double mx = mu[0];
            w[0] = 0.5 * a[0][0] / (hx * hx) + std::max(mx, 0.0) / hx;
            w[1] = 0.5 * a[0][0] / (hx * hx) + std::max(-mx, 0.0) / hx;
            double mu1 = std::abs(mx);
            double amax = std::abs(a[0][0]);
            if (d == 2) {
                const double my = mu[1];
                const double cross = a[0][1] / (2.0 * hx * hy);
                const double ac = std::abs(cross);
                w[0] -= ac;
                w[1] -= ac;
                w[2] = 0.5 * a[1][1] / (hy * hy) + std::max(my, 0.0) / hy - ac;
                w[3] = 0.5 * a[1][1] / (hy * hy) + std::max(-my, 0.0) / hy - ac;
                if (a[0][0] / hx < std::abs(a[0][1]) / hy - 1e-14 || a[1][1] / hy < std::abs(a[0][1]) / hx - 1e-14)
                    throw NumericRefusal("diffusion is not diagonally dominant for the grid; the cross stencil "
                                         "would not be monotone");
                if (cross >= 0.0) {
                    w[4] = cross;
                    w[5] = cross;
                } else {
                    w[6] = -cross;
                    w[7] = -cross;
                }
                mu1 += std::abs(my);
                amax = std::max({amax, std::abs(a[0][1]), std::abs(a[1][1])});
            }
            double total = 0.0;
            for (std::size_t q = 0; q < k; ++q) {
                w[q] = std::max(w[q], 0.0);  // clears -1e-17 from the dominance cancellation
                total += w[q];
            }
            max_total_ = std::max(max_total_, total);
            max_a_ = std::max(max_a_, amax);
            max_mu1_ = std::max(max_mu1_, mu1);
            if (spec.reward) {
                const double rw = spec.reward(x, lam);
                if (!std::isfinite(rw)) throw InvalidInput("reward is not finite");
                rewards_[n * controls_ + c] = rw;
            }
        }
        // State independence: compare every node's table against the first.
        const double* w0 = &weights_[n * controls_ * k];
        if (!have_first) {
            first_w.assign(w0, w0 + controls_ * k);
            if (spec.reward) first_r.assign(&rewards_[n * controls_], &rewards_[n * controls_] + controls_);
            have_first = true;
        } else if (state_independent_) {
            state_independent_ = std::equal(first_w.begin(), first_w.end(), w0) &&
                                 (!spec.reward || std::equal(first_r.begin(), first_r.end(), &rewards_[n * controls_]));
        }
    }
}

double DiscreteHamiltonian::cfl_limit() const noexcept {
    const double h = grid_.min_step();
    const double denom = 2.0 * grid_.dim() * max_a_ + h * max_mu1_;
    return denom > 0.0 ? h * h / denom : std::numeric_limits<double>::infinity();
}

double DiscreteHamiltonian::positivity_limit() const noexcept {
    return max_total_ > 0.0 ? 1.0 / max_total_ : std::numeric_limits<double>::infinity();
}

void DiscreteHamiltonian::apply(const std::vector<double>& u, std::vector<double>& out,
                                std::vector<std::size_t>* argmax) const {
    if (u.size() != grid_.size()) throw InvalidInput("field does not match the grid");
    out.assign(u.size(), 0.0);
    if (argmax) argmax->assign(u.size(), 0);
    const std::size_t k = offsets_.size();
    for (std::size_t n : interior_) {
        const double ui = u[n];
        double best = -std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t c = 0; c < controls_; ++c) {
            const double* w = &weights_[(n * controls_ + c) * k];
            double v = rewards_.empty() ? 0.0 : rewards_[n * controls_ + c];
            for (std::size_t q = 0; q < k; ++q)
                if (w[q] != 0.0) v += w[q] * (u[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(n) + offsets_[q])] - ui);
            if (v > best) {
                best = v;
                arg = c;
            }
        }
        out[n] = best;
        if (argmax) (*argmax)[n] = arg;
    }
    if (grid_.boundary() == BoundaryRule::neumann) {
        for (std::size_t n = 0; n < u.size(); ++n)
            if (grid_.on_boundary(n)) {
                const std::size_t m = grid_.inner_neighbor(n);
                out[n] = out[m];
                if (argmax) (*argmax)[n] = (*argmax)[m];
            }
    }
}

void apply_boundary(const SpatialGrid& grid, std::vector<double>& u, const std::vector<double>& frozen) {
    for (std::size_t n = 0; n < u.size(); ++n) {
        if (!grid.on_boundary(n)) continue;
        u[n] = grid.boundary() == BoundaryRule::neumann ? u[grid.inner_neighbor(n)] : frozen[n];
    }
}

ValueField hamiltonian_apply(const DiscreteHamiltonian& h, const ValueField& f) {
    if (!(f.grid == h.grid())) throw InvalidInput("field does not live on the Hamiltonian's grid");
    ValueField out{f.grid, {}, f.time};
    h.apply(f.values, out.values);
    return out;
}

ValueField hamiltonian_apply(const HamiltonianSpec& spec, const ValueField& f) {
    return hamiltonian_apply(DiscreteHamiltonian(spec, f.grid), f);
}

}  // namespace nlx::hjb
