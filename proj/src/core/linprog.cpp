#include "nlx/core/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>

#include "nlx/core/errors.hpp"

namespace nlx::lp {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;

// Column substitution x_j = offset + sign * (y_k [- y_{k+1}]) from the
// standard-form variables y >= 0.
struct Substitution {
    std::size_t first = 0;
    bool split = false;   // free variable: y_first - y_{first+1}
    double sign = 1.0;
    double offset = 0.0;
};

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0) {}

    double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double p = at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= p;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
        at(pr, pc) = 1.0;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> t_;  // last row is the objective (reduced costs)
};

// Simplex iterations: Dantzig pricing, falling back to Bland's rule while
// pivots stay degenerate. Columns flagged in `blocked` never enter. Returns
// false when the problem is unbounded. In phase one the objective is bounded
// below, so a column without an admissible pivot is numerically empty and is
// skipped instead.
bool iterate(Tableau& tab, std::vector<std::size_t>& basis, std::vector<char> blocked, bool phase_one) {
    const std::size_t m = tab.rows();
    const std::size_t n = tab.cols();
    int degenerate_run = 0;
    for (std::size_t guard = 0; guard < 200000; ++guard) {
        const bool bland = degenerate_run > 20;
        std::size_t enter = n;
        double most = -kCostTol;
        for (std::size_t c = 0; c < n; ++c) {
            if (blocked[c]) continue;
            const double rc = tab.at(m, c);
            if (rc < most) {
                enter = c;
                if (bland) break;
                most = rc;
            }
        }
        if (enter == n) return true;
        std::size_t leave = m;
        double best = kInf;
        for (std::size_t r = 0; r < m; ++r) {
            const double a = tab.at(r, enter);
            if (a <= kPivotTol) continue;
            const double ratio = std::max(tab.rhs(r), 0.0) / a;
            bool take = leave == m;
            const double slack = take ? 0.0 : 1e-12 * (1.0 + best);
            if (!take) take = ratio < best - slack;
            if (!take && ratio <= best + slack)
                take = bland ? basis[r] < basis[leave] : a > tab.at(leave, enter);
            if (take) {
                best = std::min(best, ratio);
                leave = r;
            }
        }
        if (leave == m) {
            if (!phase_one) return false;
            blocked[enter] = 1;
            continue;
        }
        degenerate_run = best <= 1e-14 ? degenerate_run + 1 : 0;
        tab.pivot(leave, enter);
        basis[leave] = enter;
        for (std::size_t r = 0; r < m; ++r)
            if (tab.rhs(r) < 0.0 && tab.rhs(r) > -1e-11) tab.rhs(r) = 0.0;
    }
    throw NumericRefusal("simplex iteration limit reached");
}

}  // namespace

Result minimize(const Problem& problem, double feasibility_tol) {
    const std::size_t n = problem.cost.size();
    std::vector<Bound> bounds = problem.bounds;
    if (bounds.empty()) bounds.assign(n, Bound{});
    if (bounds.size() != n) throw InvalidInput("lp: bounds size mismatch");
    for (const auto& row : problem.a_ub)
        if (row.size() != n) throw InvalidInput("lp: inequality row size mismatch");
    for (const auto& row : problem.a_eq)
        if (row.size() != n) throw InvalidInput("lp: equality row size mismatch");
    if (problem.a_ub.size() != problem.b_ub.size() || problem.a_eq.size() != problem.b_eq.size())
        throw InvalidInput("lp: right-hand side size mismatch");

    // Map original variables onto nonnegative standard-form columns.
    std::vector<Substitution> subs(n);
    std::size_t ny = 0;
    Matrix extra_ub;  // finite upper bounds become rows y <= upper - lower
    std::vector<double> extra_rhs;
    std::vector<std::size_t> extra_col;
    for (std::size_t j = 0; j < n; ++j) {
        const Bound b = bounds[j];
        if (b.lower > b.upper) return Result{Status::infeasible, {}, kInf};
        Substitution s;
        s.first = ny;
        if (std::isfinite(b.lower)) {
            s.offset = b.lower;
            ny += 1;
            if (std::isfinite(b.upper)) {
                extra_col.push_back(s.first);
                extra_rhs.push_back(b.upper - b.lower);
            }
        } else if (std::isfinite(b.upper)) {
            s.offset = b.upper;
            s.sign = -1.0;
            ny += 1;
        } else {
            s.split = true;
            ny += 2;
        }
        subs[j] = s;
    }

    auto expand = [&](const std::vector<double>& row, double& rhs) {
        std::vector<double> out(ny, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const auto& s = subs[j];
            rhs -= row[j] * s.offset;
            out[s.first] += s.sign * row[j];
            if (s.split) out[s.first + 1] -= row[j];
        }
        return out;
    };

    Matrix rows;
    std::vector<double> rhs;
    std::vector<char> is_ub;
    for (std::size_t i = 0; i < problem.a_ub.size(); ++i) {
        double r = problem.b_ub[i];
        rows.push_back(expand(problem.a_ub[i], r));
        rhs.push_back(r);
        is_ub.push_back(1);
    }
    for (std::size_t k = 0; k < extra_col.size(); ++k) {
        std::vector<double> row(ny, 0.0);
        row[extra_col[k]] = 1.0;
        rows.push_back(row);
        rhs.push_back(extra_rhs[k]);
        is_ub.push_back(1);
    }
    for (std::size_t i = 0; i < problem.a_eq.size(); ++i) {
        double r = problem.b_eq[i];
        rows.push_back(expand(problem.a_eq[i], r));
        rhs.push_back(r);
        is_ub.push_back(0);
    }

    const std::size_t m = rows.size();
    const std::size_t n_slack = static_cast<std::size_t>(std::count(is_ub.begin(), is_ub.end(), 1));
    const std::size_t n_std = ny + n_slack;
    const std::size_t n_cols = n_std + m;  // + artificials

    Tableau tab(m, n_cols);
    std::vector<std::size_t> basis(m);
    std::size_t slack = ny;
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < ny; ++c) tab.at(i, c) = sign * rows[i][c];
        if (is_ub[i]) tab.at(i, slack++) = sign;
        tab.at(i, n_std + i) = 1.0;
        tab.rhs(i) = sign * rhs[i];
        basis[i] = n_std + i;
    }

    // Phase one: minimize the sum of artificials.
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t c = 0; c <= n_cols; ++c)
            if (c < n_std || c == n_cols) tab.at(m, c) -= tab.at(i, c);
    std::vector<char> blocked(n_cols, 0);
    iterate(tab, basis, blocked, true);
    double scale = 1.0;
    for (double r : rhs) scale += std::abs(r);
    if (-tab.rhs(m) > feasibility_tol * scale) return Result{Status::infeasible, {}, kInf};

    // Drive artificials out of the basis; rows where that is impossible are redundant.
    std::vector<char> redundant(m, 0);
    for (std::size_t r = 0; r < m; ++r) {
        if (basis[r] < n_std) continue;
        std::size_t col = n_std;
        for (std::size_t c = 0; c < n_std; ++c) {
            if (std::abs(tab.at(r, c)) > 1e-9) {
                col = c;
                break;
            }
        }
        if (col == n_std) {
            redundant[r] = 1;
        } else {
            tab.pivot(r, col);
            basis[r] = col;
        }
    }
    for (std::size_t c = n_std; c < n_cols; ++c) blocked[c] = 1;

    // Phase two objective in standard-form columns.
    std::vector<double> cost_y(n_cols, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& s = subs[j];
        cost_y[s.first] += s.sign * problem.cost[j];
        if (s.split) cost_y[s.first + 1] -= problem.cost[j];
    }
    for (std::size_t c = 0; c <= n_cols; ++c) tab.at(m, c) = c < n_cols ? cost_y[c] : 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        if (redundant[r]) continue;
        const double f = tab.at(m, basis[r]);
        if (f == 0.0) continue;
        for (std::size_t c = 0; c <= n_cols; ++c) tab.at(m, c) -= f * tab.at(r, c);
    }
    // Redundant rows keep a zero artificial in the basis; keep them from pivoting.
    for (std::size_t r = 0; r < m; ++r)
        if (redundant[r])
            for (std::size_t c = 0; c < n_cols; ++c) tab.at(r, c) = (c == basis[r]) ? 1.0 : 0.0;

    if (!iterate(tab, basis, blocked, false)) return Result{Status::unbounded, {}, -kInf};

    std::vector<double> y(n_cols, 0.0);
    for (std::size_t r = 0; r < m; ++r) y[basis[r]] = tab.rhs(r);
    Result result;
    result.status = Status::optimal;
    result.x.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& s = subs[j];
        double v = s.sign * y[s.first];
        if (s.split) v -= y[s.first + 1];
        result.x[j] = s.offset + v;
    }
    result.objective = std::inner_product(problem.cost.begin(), problem.cost.end(), result.x.begin(), 0.0);
    return result;
}

}  // namespace nlx::lp
