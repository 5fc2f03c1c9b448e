#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlx/control/chain.hpp"
#include "nlx/core/tolerances.hpp"
#include "nlx/hjb/grid.hpp"

namespace nlx::control {

/// Terminal data of the control problem: a function of X_T, a grid field at
/// the horizon, or a function of X at a few monitoring dates (one dimension).
class Payoff {
public:
    static Payoff terminal(std::function<double(const Point&)> f);
    static Payoff field(hjb::ValueField f);
    /// `dates` strictly increasing; f receives X at those dates in order.
    static Payoff cylinder(std::vector<double> dates, std::function<double(const std::vector<double>&)> f);

    [[nodiscard]] const std::vector<double>& dates() const noexcept { return dates_; }
    [[nodiscard]] bool is_cylinder() const noexcept { return static_cast<bool>(cylinder_); }

private:
    friend struct PayoffAccess;
    std::function<double(const Point&)> terminal_;
    std::optional<hjb::ValueField> field_;
    std::vector<double> dates_;
    std::function<double(const std::vector<double>&)> cylinder_;
};

/// Feedback control index per (time slice, node).
struct PolicyField {
    std::vector<double> times;
    std::vector<std::vector<std::uint32_t>> choice;
};

/// Value function on the un-augmented time slices t0, t0 + dt, ... up to the
/// first monitoring date (or the horizon), with the feedback policy used to
/// reach each slice from the next one.
struct ValueSurface {
    std::vector<hjb::ValueField> slices;
    PolicyField policy;
    [[nodiscard]] const hjb::ValueField& initial() const { return slices.front(); }
};

/// Backward dynamic programming
///     V_t(x) = max over controls of -h dt + sum_y p(x, y) V_{t+dt}(y),
/// ties to the lowest control index. Cylinder payoffs carry the recorded
/// coordinates as extra state, collapsed at each monitoring date. The horizon
/// and the dates must lie on the chain's time grid.
[[nodiscard]] ValueSurface value_function(const LatticeChain& chain, const ControlProblemSpec& spec,
                                          const Payoff& payoff, const Tolerances& tol = default_tolerances());

/// `t,x,lambda_index` (or `t,x,y,lambda_index`) rows.
[[nodiscard]] std::string policy_csv(const ValueSurface& surface);

/// sup over nodes of |V_t0 (direct) - V_t0 (two-stage through s)|: the second
/// sweep restarts at s with the first sweep's slice as terminal data. Every
/// monitoring date must lie in [s, horizon].
[[nodiscard]] double dpp_residual(const LatticeChain& chain, const ControlProblemSpec& spec, const Payoff& payoff,
                                  double s);

struct CrossValidation {
    double gap = 0.0;            // sup over the shared interior of |lattice - semigroup|
    double chain_dt = 0.0;
    double semigroup_dt = 0.0;
    std::size_t nodes = 0;
};

/// Relaxed value with h = 0 against the HJB semigroup for a Markovian payoff,
/// each with its own largest admissible step.
[[nodiscard]] CrossValidation cross_validate(const ControlProblemSpec& spec, const hjb::SpatialGrid& grid,
                                             const std::function<double(const Point&)>& g);

}  // namespace nlx::control
