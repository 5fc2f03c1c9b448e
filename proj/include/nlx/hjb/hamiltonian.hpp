#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "nlx/hjb/grid.hpp"

namespace nlx::hjb {

using Control = std::vector<double>;

/// Finite control sample and coefficient maps of
///     H(f)(x) = max over controls of  reward + <mu, grad f> + 1/2 tr(sigma sigma^T D^2 f).
struct HamiltonianSpec {
    std::vector<Control> controls;
    std::function<Point(const Point&, const Control&)> drift;
    /// d x noise_dim, row-major.
    std::function<std::vector<double>(const Point&, const Control&)> volatility;
    int noise_dim = 1;
    /// Optional; zero when empty.
    std::function<double(const Point&, const Control&)> reward;
    /// Bound on |mu| and |sigma| entries, checked on the grid when finite.
    double bound = std::numeric_limits<double>::infinity();
};

/// `samples` equally spaced points of [lower, upper] (endpoints included).
[[nodiscard]] std::vector<Control> sample_controls(double lower, double upper, int samples);
/// Cartesian product of sampled axes.
[[nodiscard]] std::vector<Control> product_controls(const std::vector<std::vector<double>>& axes);

/// sigma = sqrt(a) over a in [a_lo, a_hi], zero drift, in dimension 1.
[[nodiscard]] HamiltonianSpec g_heat(double a_lo, double a_hi, int samples);

/// Grid discretization of a HamiltonianSpec: upwind drift and centered
/// diffusion, with the 7-point cross stencil in 2D. For each interior node and
/// control,
///     H_c(u)_i = reward_ic + sum_k w_ick (u_{i + offset_k} - u_i),   w >= 0.
class DiscreteHamiltonian {
public:
    /// Throws NumericRefusal if the diffusion is not diagonally dominant for
    /// the grid, InvalidInput if coefficients exceed the declared bound.
    DiscreteHamiltonian(const HamiltonianSpec& spec, SpatialGrid grid);

    [[nodiscard]] const SpatialGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t num_controls() const noexcept { return controls_; }
    [[nodiscard]] std::size_t stencil_size() const noexcept { return offsets_.size(); }
    [[nodiscard]] const std::vector<std::ptrdiff_t>& offsets() const noexcept { return offsets_; }
    [[nodiscard]] const double* weights(std::size_t node, std::size_t control) const noexcept {
        return &weights_[(node * controls_ + control) * offsets_.size()];
    }
    [[nodiscard]] double reward(std::size_t node, std::size_t control) const noexcept {
        return rewards_.empty() ? 0.0 : rewards_[node * controls_ + control];
    }
    [[nodiscard]] bool has_reward() const noexcept { return !rewards_.empty(); }
    [[nodiscard]] const std::vector<std::size_t>& interior() const noexcept { return interior_; }

    /// Largest explicit step allowed: h^2 / (2 d max|a_kl| + h max|mu|_1).
    [[nodiscard]] double cfl_limit() const noexcept;
    /// 1 / max total weight: the largest step keeping every stay probability >= 0.
    [[nodiscard]] double positivity_limit() const noexcept;
    [[nodiscard]] double max_diffusion() const noexcept { return max_a_; }
    [[nodiscard]] double max_drift() const noexcept { return max_mu1_; }
    /// Coefficients (hence weights and rewards) agree at every interior node.
    [[nodiscard]] bool state_independent() const noexcept { return state_independent_; }

    /// H(u) at interior nodes; boundary nodes follow the grid rule (Neumann
    /// copies the inner neighbor, Dirichlet is 0). Ties go to the lowest
    /// control index.
    void apply(const std::vector<double>& u, std::vector<double>& out,
               std::vector<std::size_t>* argmax = nullptr) const;

private:
    SpatialGrid grid_;
    std::size_t controls_ = 0;
    std::vector<std::ptrdiff_t> offsets_;
    std::vector<double> weights_;
    std::vector<double> rewards_;
    std::vector<std::size_t> interior_;
    double max_a_ = 0.0;
    double max_mu1_ = 0.0;
    double max_total_ = 0.0;
    bool state_independent_ = true;
};

/// Boundary rule applied in place: Neumann copies inner neighbors, Dirichlet
/// restores `frozen`.
void apply_boundary(const SpatialGrid& grid, std::vector<double>& u, const std::vector<double>& frozen);

/// ValueField form of DiscreteHamiltonian::apply.
[[nodiscard]] ValueField hamiltonian_apply(const DiscreteHamiltonian& h, const ValueField& f);
[[nodiscard]] ValueField hamiltonian_apply(const HamiltonianSpec& spec, const ValueField& f);

}  // namespace nlx::hjb
