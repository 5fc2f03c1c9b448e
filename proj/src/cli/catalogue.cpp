#include <sstream>

#include "nlx/cli/app.hpp"

namespace nlx::cli {

const std::vector<CheckInfo>& check_catalogue() {
    static const std::vector<CheckInfo> checks = {
        {"duality-check", "duality.kl_fixture", "entropic penalty of a Dirac against the uniform prior is log 2",
         "entropic risk measure, relative entropy conjugate"},
        {"duality-check", "duality.roundtrip_entropic", "sup_P E^P - penalty reproduces the entropic expectation",
         "penalty representation of convex expectations"},
        {"duality-check", "duality.roundtrip_sublinear", "sup over the hull reproduces the worst-case expectation",
         "penalty representation, sublinear case"},
        {"duality-check", "duality.roundtrip_penalty", "convex minorant of a penalty table reproduces its expectation",
         "penalty representation of convex expectations"},
        {"duality-check", "duality.bundle_roundtrip", "roundtrip on every family of the scenario bundle",
         "penalty representation of convex expectations"},
        {"duality-check", "marginal.equal_hulls", "equal hulls, different vertex lists: identical expectations",
         "finite-dimensional uniqueness"},
        {"duality-check", "marginal.separated", "a shrunk hull is told apart by a cylinder functional",
         "finite-dimensional uniqueness, cylinder test class"},
        {"duality-check", "marginal.lp_witness", "linear program finds a separating functional",
         "finite-dimensional uniqueness"},
        {"tower-check", "tower.stable_families", "tower residual on random rectangular families",
         "stability under conditioning and pasting implies the tower property"},
        {"tower-check", "tower.stability_random", "random rectangular families pass the stability check",
         "stability under conditioning and pasting"},
        {"tower-check", "tower.bundle_stable", "tower residual on the bundled stable fixture",
         "stability under conditioning and pasting implies the tower property"},
        {"tower-check", "stability.bundle_stable", "the bundled stable fixture is stable",
         "stability under conditioning and pasting"},
        {"tower-check", "tower.nonstable_fixture", "the non-stable fixture violates the tower property",
         "tower property fails without pasting stability"},
        {"tower-check", "stability.nonstable_witness", "the non-stable fixture yields a pasting witness",
         "stability under pasting"},
        {"tower-check", "shift.iid_family", "an iid family is shift homogeneous", "Markovian homogeneous expectations"},
        {"tower-check", "shift.time_varying", "a level-dependent family is not shift homogeneous",
         "Markovian homogeneous expectations"},
        {"heat", "heat.convex_value", "T_1(x^2)(0) = 2 on the G-heat band [1, 2]", "G-heat equation closed form"},
        {"heat", "heat.concave_value", "T_1(-x^2)(0) = -1 on the G-heat band [1, 2]", "G-heat equation closed form"},
        {"heat", "heat.refinement_ratio", "halving dx cuts the quartic error at least threefold",
         "monotone scheme convergence"},
        {"heat", "heat.semigroup_residual", "T_{t+s} = T_t T_s on the interior", "semigroup property"},
        {"generator-check", "generator.g_heat", "(T_h f - f)/h matches H(f) at x = 0 for f = x^2",
         "pointwise generator equals the Hamiltonian"},
        {"generator-check", "generator.drift_band", "generator under drift uncertainty matches its Hamiltonian",
         "pointwise generator equals the Hamiltonian"},
        {"levy-invariants", "levy.translation", "T commutes with spatial shifts on the interior",
         "Levy-type (spatially homogeneous) semigroups"},
        {"levy-invariants", "levy.continuity", "sup|T_t g - g| within the measured small-time bound",
         "Levy-type semigroups, small-time continuity"},
        {"compare", "compare.single", "narrower volatility band gives smaller values",
         "comparison of Hamiltonians and semigroups"},
        {"compare", "compare.nested", "ordering persists for two-time functionals",
         "comparison of Hamiltonians and semigroups"},
        {"control", "control.quadratic_cost", "h = lambda^2 benchmark value 0.25", "relaxed control representation"},
        {"control", "control.bang_bang", "cost-free drift control value x + T", "relaxed control representation"},
        {"control", "control.moments", "lattice chain matches drift and covariance", "Markov chain approximation"},
        {"dpp-check", "dpp.terminal", "two-stage sweep reproduces the direct value", "dynamic programming principle"},
        {"dpp-check", "dpp.cylinder", "same for a two-date cylinder payoff", "dynamic programming principle"},
        {"cross-validate", "cross.g_heat", "lattice value against the HJB semigroup for x^2",
         "relaxed control value solves the HJB semigroup"},
        {"cross-validate", "cross.g_heat_tanh", "lattice value against the HJB semigroup for tanh",
         "relaxed control value solves the HJB semigroup"},
        {"laplace", "laplace.hypothesis", "coefficients approach their small-noise limits",
         "small-noise hypothesis of the Laplace principle"},
        {"laplace", "laplace.primal_eps_<eps>", "log-domain route equals x + T/2 for the Gaussian benchmark",
         "entropic risk as a linear-exponential HJB problem"},
        {"laplace", "laplace.transformed_eps_<eps>", "transformed route equals x + T/2 for the Gaussian benchmark",
         "transformed HJB problem with quadratic control cost"},
        {"laplace", "laplace.clipping_bound", "Gaussian tail bound on the clipping error",
         "bounded payoffs in the Laplace principle"},
        {"laplace", "laplace.limit", "deterministic limit equals 0.5", "Laplace principle, deterministic limit"},
        {"laplace", "laplace.drift_limit", "drift-only limit equals x + T", "Laplace principle, deterministic limit"},
        {"laplace", "laplace.route_gap", "primal and transformed routes agree",
         "equivalence of the entropic and transformed problems"},
        {"laplace", "laplace.route_gap_ratio", "route gap shrinks at least threefold when dx halves",
         "equivalence of the entropic and transformed problems"},
        {"laplace", "laplace.tanh_ratio", "gap to the limit at eps = 0.05 is at most half that at eps = 0.5",
         "Laplace principle, convergence in eps"},
    };
    return checks;
}

std::string list_checks_text() {
    std::ostringstream out;
    for (const auto& c : check_catalogue())
        out << c.subcommand << "  " << c.name << "  " << c.description << "  [" << c.anchor << "]\n";
    return out.str();
}

}  // namespace nlx::cli
