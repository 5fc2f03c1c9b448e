#pragma once

#include <functional>
#include <vector>

#include "nlx/hjb/hamiltonian.hpp"

namespace nlx::control {

using hjb::Control;
using hjb::Point;

/// Relaxed control data: dynamics (drift, volatility, control sample) and a
/// running cost h >= 0 with min over the sample equal to 0, on [t0, horizon].
struct ControlProblemSpec {
    hjb::HamiltonianSpec dynamics;
    std::function<double(const Control&)> running_cost;  // empty means h = 0
    double t0 = 0.0;
    double horizon = 1.0;

    [[nodiscard]] double cost(const Control& c) const { return running_cost ? running_cost(c) : 0.0; }
    [[nodiscard]] bool cost_free() const;
};

/// Throws InvalidInput unless h >= 0 on the sample and attains 0 there, and
/// t0 < horizon.
void validate_standing_assumption(const ControlProblemSpec& spec, double tol = 1e-12);

struct MomentReport {
    double drift_error = 0.0;     // max |E[dX]/dt - mu|
    double variance_error = 0.0;  // max |Cov[dX]/dt - sigma sigma^T|
    double variance_allowance = 0.0;  // max of |mu_i| h_i + |mu|^2 dt over nodes and controls
    double variance_excess = 0.0;     // max over nodes of the error beyond that node's allowance
    [[nodiscard]] bool consistent() const noexcept { return drift_error <= 1e-9 && variance_excess <= 1e-9; }
};

/// Controlled Markov chain on the grid: from node i under control c the chain
/// moves to i + offset_k with probability dt * w_ick and stays otherwise,
/// where w are the monotone stencil weights of the HJB discretization.
class LatticeChain {
public:
    /// Refuses (NumericRefusal, suggesting the admissible step) when some stay
    /// probability would be negative, and when the moment check fails.
    LatticeChain(const ControlProblemSpec& spec, hjb::SpatialGrid grid, double dt);

    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] const hjb::SpatialGrid& grid() const noexcept { return stencil_.grid(); }
    [[nodiscard]] const hjb::DiscreteHamiltonian& stencil() const noexcept { return stencil_; }
    [[nodiscard]] std::size_t num_controls() const noexcept { return stencil_.num_controls(); }
    [[nodiscard]] const std::vector<double>& costs() const noexcept { return costs_; }
    [[nodiscard]] const std::vector<Control>& controls() const noexcept { return controls_; }

    /// Transition probabilities to the stencil neighbors (same order as the
    /// stencil offsets) and the stay probability last.
    [[nodiscard]] std::vector<double> probabilities(std::size_t node, std::size_t control) const;
    [[nodiscard]] const MomentReport& moments() const noexcept { return moments_; }

private:
    hjb::DiscreteHamiltonian stencil_;
    double dt_;
    std::vector<double> costs_;
    std::vector<Control> controls_;
    MomentReport moments_;
};

/// Largest step keeping all transition probabilities nonnegative.
[[nodiscard]] double max_chain_step(const ControlProblemSpec& spec, const hjb::SpatialGrid& grid);
/// Largest admissible step that divides the horizon into `multiple * k` steps.
[[nodiscard]] double chain_step_for(const ControlProblemSpec& spec, const hjb::SpatialGrid& grid, int multiple = 1);

/// Moments of one chain, recomputed from the probabilities.
[[nodiscard]] MomentReport moment_check(const LatticeChain& chain, const ControlProblemSpec& spec);

}  // namespace nlx::control
