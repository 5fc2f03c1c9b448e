#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nlx/core/tolerances.hpp"
#include "nlx/hjb/hamiltonian.hpp"

namespace nlx::laplace {

using hjb::Control;
using hjb::Point;
using hjb::SpatialGrid;
using hjb::ValueField;

/// Controlled diffusions indexed by the noise level eps, with their limits
/// mu0 and sigma0 (the hypothesis is mu^eps -> mu0 and eps^{-1/2} sigma^eps -> sigma0).
struct SmallNoiseFamily {
    std::vector<Control> controls;
    std::function<Point(double, const Point&, const Control&)> drift;
    std::function<std::vector<double>(double, const Point&, const Control&)> volatility;  // d x noise_dim
    std::function<Point(const Point&, const Control&)> drift0;
    std::function<std::vector<double>(const Point&, const Control&)> volatility0;
    int noise_dim = 1;
    std::vector<double> schedule;  // strictly decreasing
    double bound = std::numeric_limits<double>::infinity();
};

/// mu^eps = mu, sigma^eps = sqrt(eps) sigma for fixed coefficients.
[[nodiscard]] SmallNoiseFamily vanishing_noise(const hjb::HamiltonianSpec& base, std::vector<double> schedule);

/// Coefficients at one noise level as a Hamiltonian.
[[nodiscard]] hjb::HamiltonianSpec at_epsilon(const SmallNoiseFamily& family, double eps);

struct HypothesisReport {
    std::vector<double> eps;
    std::vector<double> distance;  // sup |mu^eps - mu0| + sup |eps^{-1/2} sigma^eps - sigma0|
    bool decreasing = true;
};
[[nodiscard]] HypothesisReport check_family(const SmallNoiseFamily& family, const SpatialGrid& grid);

/// Terminal payoff clipped to [-clip, clip]; `bound` is the declared sup norm
/// of the clipped payoff on the grid (checked when finite).
struct EntropicSpec {
    double horizon = 1.0;
    std::function<double(const Point&)> payoff;
    double bound = std::numeric_limits<double>::infinity();
    double clip = 20.0;
};

/// eps log of the solution of the linear-exponential HJB problem with terminal
/// exp(phi / eps), computed for v = log of that solution so that neither
/// overflow nor underflow occurs. Refuses eps below the configured floor.
[[nodiscard]] ValueField entropic_risk_primal(const SmallNoiseFamily& family, const EntropicSpec& spec, double eps,
                                              const SpatialGrid& grid, double dt = 0.0,
                                              const Tolerances& tol = default_tolerances());

struct TransformedResult {
    ValueField value;
    double a_max = 0.0;
    double saturation = 0.0;  // fraction of argmax evaluations on the a-grid boundary
};

/// The transformed HJB problem over controls (lambda, a): drift
/// mu^eps + eps^{-1/2} sigma^eps a, diffusion sigma^eps, reward -|a|^2 / 2,
/// with a on a uniform grid in [-a_max, a_max]^r. Refuses when the argmax sits
/// on the truncation boundary too often.
[[nodiscard]] TransformedResult entropic_risk_transformed(const SmallNoiseFamily& family, const EntropicSpec& spec,
                                                          double eps, const SpatialGrid& grid, double dt = 0.0,
                                                          double a_max = 0.0,
                                                          const Tolerances& tol = default_tolerances());

struct LimitResult {
    ValueField value;
    double a_max = 0.0;
    double saturation = 0.0;
    double delta = 0.0;
};

/// Semi-Lagrangian dynamic program for
///     sup over (lambda, a) of phi(X_T) - 1/2 int |a|^2,   dX = (mu0 + sigma0 a) dt,
/// with linear (bilinear in 2D) interpolation; first order in the time step.
[[nodiscard]] LimitResult deterministic_limit(const SmallNoiseFamily& family, const EntropicSpec& spec,
                                              const SpatialGrid& grid, double delta, double a_max = 0.0,
                                              const Tolerances& tol = default_tolerances());

/// max(1, 2 Lip(phi) sup|sigma0|), measured on the grid.
[[nodiscard]] double default_a_max(const SmallNoiseFamily& family, const EntropicSpec& spec, const SpatialGrid& grid);

/// Gaussian tail estimate of |E^eps(phi) - E^eps(clip phi)| at x.
[[nodiscard]] double clipping_error_bound(const SmallNoiseFamily& family, const EntropicSpec& spec, double eps,
                                          const SpatialGrid& grid, const Point& x);

/// sup over the interior of |primal - transformed| at one noise level.
[[nodiscard]] double route_gap(const SmallNoiseFamily& family, const EntropicSpec& spec, double eps,
                               const SpatialGrid& grid, const Tolerances& tol = default_tolerances());

struct ConvergenceEntry {
    double eps = 0.0;
    double value = 0.0;
    double limit = 0.0;
    double gap = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceEntry> rows;
    bool decreasing = true;  // after the first entry, up to 1e-2 of scheme noise
};

/// Transformed route along the schedule against the deterministic limit at x.
[[nodiscard]] ConvergenceReport convergence_report(const SmallNoiseFamily& family, const EntropicSpec& spec,
                                                   const SpatialGrid& grid, const SpatialGrid& limit_grid,
                                                   double delta, const Point& x,
                                                   const Tolerances& tol = default_tolerances());

[[nodiscard]] std::string convergence_csv(const ConvergenceReport& report);

}  // namespace nlx::laplace
