#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>

#include "nlx/cli/app.hpp"
#include "nlx/control/dp.hpp"
#include "nlx/core/errors.hpp"
#include "nlx/hjb/semigroup.hpp"
#include "nlx/laplace/engine.hpp"
#include "nlx/lattice/checks.hpp"
#include "nlx/lattice/duality.hpp"

namespace py = pybind11;
using namespace nlx;

namespace {

using Node = std::pair<int, std::size_t>;

lattice::NodeId node_id(const Node& n) { return {n.first, n.second}; }

lattice::PathMeasure measure(const std::vector<double>& w) { return lattice::PathMeasure(w, 1e-9); }

std::vector<lattice::PathMeasure> measures(const std::vector<std::vector<double>>& ws) {
    std::vector<lattice::PathMeasure> out;
    for (const auto& w : ws) out.push_back(measure(w));
    return out;
}

lattice::AmbiguitySet ambiguity(const lattice::ScenarioTree& tree, const std::vector<std::vector<double>>& catalogue,
                                const std::map<Node, std::vector<std::size_t>>& members) {
    auto cat = std::make_shared<lattice::MeasureCatalogue>(measures(catalogue));
    lattice::AmbiguitySet set(tree, cat);
    for (const auto& [n, ids] : members) set.assign(node_id(n), ids, 1e-9);
    return set;
}

std::pair<std::vector<double>, std::vector<double>> field_pair(const hjb::ValueField& f) {
    std::vector<double> xs(f.grid.size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = f.grid.point(i)[0];
    return {xs, f.values};
}

hjb::SpatialGrid line(double lower, double upper, double dx) { return hjb::SpatialGrid::line(lower, upper, dx); }

}  // namespace

PYBIND11_MODULE(_nlx, m) {
    m.doc() = "Nonlinear expectations on scenario trees, HJB semigroups, relaxed control and the Laplace engine.";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<NumericRefusal>(m, "NumericRefusal", PyExc_RuntimeError);

    // Scenario trees and expectations.
    py::class_<lattice::ScenarioTree>(m, "ScenarioTree")
        .def(py::init<int, int>(), py::arg("states"), py::arg("steps"))
        .def_property_readonly("num_leaves", &lattice::ScenarioTree::num_leaves)
        .def_property_readonly("num_steps", &lattice::ScenarioTree::num_steps)
        .def_property_readonly("num_states", &lattice::ScenarioTree::num_states)
        .def("nodes_at", &lattice::ScenarioTree::nodes_at)
        .def("leaves", [](const lattice::ScenarioTree& t, Node n) {
            const auto r = t.leaves(node_id(n));
            return std::pair{r.begin, r.end};
        })
        .def("path", &lattice::ScenarioTree::path);

    m.def("relative_entropy", [](const std::vector<double>& p, const std::vector<double>& q) {
        return lattice::relative_entropy(measure(p), measure(q));
    });
    m.def("entropic", [](const std::vector<double>& p, double eps, const std::vector<double>& phi) {
        return lattice::entropic_expectation(measure(p), eps, lattice::Functional(phi));
    }, py::arg("p"), py::arg("eps"), py::arg("phi"));
    m.def("hull_distance", [](const std::vector<std::vector<double>>& vertices, const std::vector<double>& p) {
        return lattice::hull_distance(measures(vertices), measure(p));
    });

    py::class_<lattice::EntropicExpectation>(m, "EntropicExpectation")
        .def(py::init([](const lattice::ScenarioTree& tree, const std::vector<double>& prior, double eps) {
            return lattice::EntropicExpectation(tree, measure(prior), eps);
        }))
        .def("evaluate", [](const lattice::EntropicExpectation& e, Node n, const std::vector<double>& phi) {
            return e.evaluate(node_id(n), lattice::Functional(phi));
        })
        .def("dual_penalty", [](const lattice::EntropicExpectation& e, Node n, const std::vector<double>& p) {
            return lattice::dual_penalty(e, node_id(n), measure(p));
        })
        .def("tower_residual", [](const lattice::EntropicExpectation& e, const std::vector<double>& phi) {
            return lattice::max_tower_residual(e, lattice::Functional(phi));
        });

    py::class_<lattice::WorstCaseExpectation>(m, "WorstCaseExpectation")
        .def(py::init([](const lattice::ScenarioTree& tree, const std::vector<std::vector<double>>& catalogue,
                         const std::map<Node, std::vector<std::size_t>>& members) {
                 return lattice::WorstCaseExpectation(ambiguity(tree, catalogue, members));
             }),
             py::arg("tree"), py::arg("catalogue"), py::arg("members"))
        .def("evaluate", [](const lattice::WorstCaseExpectation& e, Node n, const std::vector<double>& phi) {
            return e.evaluate(node_id(n), lattice::Functional(phi));
        })
        .def("dual_penalty", [](const lattice::WorstCaseExpectation& e, Node n, const std::vector<double>& p) {
            return lattice::dual_penalty(e, node_id(n), measure(p));
        })
        .def("tower_residual", [](const lattice::WorstCaseExpectation& e, const std::vector<double>& phi) {
            return lattice::max_tower_residual(e, lattice::Functional(phi));
        })
        .def("stable", [](const lattice::WorstCaseExpectation& e) { return lattice::check_stability(e.set()).pass(); });

    // HJB semigroup on a line.
    m.def("g_heat", [](const std::function<double(double)>& g, double t, double a_lo, double a_hi, int samples,
                       double lower, double upper, double dx) {
        const hjb::DiscreteHamiltonian h(hjb::g_heat(a_lo, a_hi, samples), line(lower, upper, dx));
        const auto f = hjb::sample(h.grid(), [&](const hjb::Point& p) { return g(p[0]); });
        return field_pair(hjb::evolve(h, f, t));
    }, py::arg("g"), py::arg("t"), py::arg("a_lo") = 1.0, py::arg("a_hi") = 2.0, py::arg("samples") = 17,
       py::arg("lower") = -10.0, py::arg("upper") = 10.0, py::arg("dx") = 0.05,
       "T_t g on the grid for the G-heat band [a_lo, a_hi]; returns (x, values).");
    m.def("cfl_limit", [](double a_lo, double a_hi, double dx) {
        return hjb::DiscreteHamiltonian(hjb::g_heat(a_lo, a_hi, 2), line(-1.0, 1.0, dx)).cfl_limit();
    });

    // Relaxed drift control dX = lambda dt, cost c lambda^2.
    m.def("drift_control_value", [](double cost, double horizon, double x, double lower, double upper, double dx) {
        control::ControlProblemSpec spec;
        spec.dynamics.controls = hjb::sample_controls(-1.0, 1.0, default_tolerances().lambda_samples);
        spec.dynamics.drift = [](const hjb::Point&, const hjb::Control& u) { return hjb::Point{u[0], 0.0}; };
        spec.dynamics.volatility = [](const hjb::Point&, const hjb::Control&) { return std::vector<double>{0.0}; };
        if (cost > 0.0) spec.running_cost = [cost](const hjb::Control& u) { return cost * u[0] * u[0]; };
        spec.horizon = horizon;
        const auto grid = line(lower, upper, dx);
        const control::LatticeChain chain(spec, grid, control::chain_step_for(spec, grid, 2));
        const auto v = control::value_function(chain, spec, control::Payoff::terminal([](const hjb::Point& p) {
            return p[0];
        }));
        return v.initial().at({x, 0.0});
    }, py::arg("cost") = 1.0, py::arg("horizon") = 1.0, py::arg("x") = 0.0, py::arg("lower") = -3.0,
       py::arg("upper") = 3.0, py::arg("dx") = 0.05);

    // Entropic risk under vanishing unit noise.
    m.def("entropic_risk", [](const std::function<double(double)>& payoff, double eps, const std::string& route,
                              double x, double lower, double upper, double dx) {
        hjb::HamiltonianSpec base;
        base.controls = {{0.0}};
        base.drift = [](const hjb::Point&, const hjb::Control&) { return hjb::Point{0.0, 0.0}; };
        base.volatility = [](const hjb::Point&, const hjb::Control&) { return std::vector<double>{1.0}; };
        const auto family = laplace::vanishing_noise(base, {eps});
        laplace::EntropicSpec spec;
        spec.payoff = [&payoff](const hjb::Point& p) { return payoff(p[0]); };
        const auto grid = line(lower, upper, dx);
        if (route == "primal") return laplace::entropic_risk_primal(family, spec, eps, grid).at({x, 0.0});
        if (route == "transformed") return laplace::entropic_risk_transformed(family, spec, eps, grid).value.at({x, 0.0});
        throw InvalidInput("route must be 'primal' or 'transformed'");
    }, py::arg("payoff"), py::arg("eps"), py::arg("route") = "primal", py::arg("x") = 0.0, py::arg("lower") = -10.0,
       py::arg("upper") = 10.0, py::arg("dx") = 0.05);

    // Experiments.
    m.def("list_checks", [] {
        std::vector<std::map<std::string, std::string>> out;
        for (const auto& c : cli::check_catalogue())
            out.push_back({{"subcommand", c.subcommand}, {"name", c.name}, {"description", c.description},
                           {"anchor", c.anchor}});
        return out;
    });
    m.def("run", [](const std::optional<std::filesystem::path>& config, const std::optional<std::string>& subcommand,
                    const std::optional<std::filesystem::path>& out) {
        auto cfg = config ? cli::load_config(*config, subcommand) : cli::make_config(io::IniDocument{}, subcommand);
        if (out) cfg.output = *out;
        const auto result = cli::run(cfg);
        std::vector<py::dict> checks;
        for (const auto& c : result.checks) {
            py::dict d;
            d["name"] = c.name;
            d["value"] = c.value;
            d["tolerance"] = c.tolerance;
            d["pass"] = c.pass;
            checks.push_back(d);
        }
        return py::make_tuple(result.exit_code(), checks);
    }, py::arg("config") = py::none(), py::arg("subcommand") = py::none(), py::arg("out") = py::none(),
       "Runs one experiment; returns (exit_code, checks). Raises InvalidInput or NumericRefusal.");
}
