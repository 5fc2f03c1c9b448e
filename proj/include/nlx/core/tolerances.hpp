#pragma once

namespace nlx {

/// Every numerical threshold used by the library, with its default value.
/// Configs may override individual fields; nothing else hard-codes a tolerance.
struct Tolerances {
    double measure_sum = 1e-12;      // |sum of weights - 1|
    double exact = 1e-12;            // identities that hold up to rounding
    double hull = 1e-9;              // convex-hull membership by linear feasibility
    double roundtrip = 1e-9;         // penalty -> expectation reconstruction
    double marginal = 1e-10;         // cylinder-function agreement
    int subgradient_iterations = 500;
    double subgradient_box = 50.0;   // sup-norm box for the generic conjugate search
    int lambda_samples = 17;         // per control axis
    int a_grid_points = 33;          // per noise axis, transformed Laplace route
    double saturation_fraction = 1e-3;
    double primal_epsilon_floor = 1e-3;
    int max_monitoring_dates = 3;
    double augmented_state_limit = 5e7;  // entries in an augmented DP slice
};

inline const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

}  // namespace nlx
