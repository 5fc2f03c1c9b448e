#pragma once

#include <limits>
#include <vector>

namespace nlx::lp {

using Matrix = std::vector<std::vector<double>>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Bound {
    double lower = 0.0;
    double upper = kInf;
};

enum class Status { optimal, infeasible, unbounded };

struct Result {
    Status status = Status::infeasible;
    std::vector<double> x;
    double objective = kInf;
};

/// Dense linear program
///
///     minimize    c'x
///     subject to  A_ub x <= b_ub,  A_eq x = b_eq,  lower <= x <= upper.
///
/// Two-phase tableau simplex, Dantzig pricing with a Bland fallback; meant for the small
/// (tens to a few hundred variables) problems that arise on scenario trees.
/// An empty `bounds` means x >= 0 for every variable. `feasibility_tol`
/// is the largest phase-one residual still accepted as feasible.
struct Problem {
    std::vector<double> cost;
    Matrix a_ub;
    std::vector<double> b_ub;
    Matrix a_eq;
    std::vector<double> b_eq;
    std::vector<Bound> bounds;
};

[[nodiscard]] Result minimize(const Problem& problem, double feasibility_tol = 1e-9);

}  // namespace nlx::lp
