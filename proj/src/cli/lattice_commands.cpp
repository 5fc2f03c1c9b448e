#include <algorithm>
#include <cmath>
#include <sstream>

#include "context.hpp"
#include "nlx/core/errors.hpp"
#include "nlx/lattice/checks.hpp"
#include "nlx/lattice/duality.hpp"
#include "nlx/lattice/random.hpp"

namespace nlx::cli {

using namespace nlx::lattice;

namespace {

std::string node_label(NodeId n) { return std::to_string(n.level) + ":" + std::to_string(n.index); }

std::vector<NodeId> all_nodes(const ScenarioTree& tree) {
    std::vector<NodeId> out;
    for (int k = -1; k < tree.num_steps(); ++k)
        for (std::size_t i = 0; i < tree.nodes_at(k); ++i) out.push_back({k, i});
    return out;
}

double roundtrip_error(const ConditionalExpectation& e, NodeId node, const Functional& phi,
                       const std::vector<PathMeasure>& candidates, const Tolerances& tol) {
    const double direct = e.evaluate(node, phi);
    const double rebuilt = reconstruct_expectation(e, node, phi, candidates, tol);
    return std::abs(direct - rebuilt);
}

// Candidates for the dual supremum: the family's own active measure and
// members, plus random measures on the node (most of which the penalty excludes).
std::vector<PathMeasure> candidates_for(Rng& rng, const ConditionalExpectation& e, NodeId node, const Functional& phi,
                                        const std::vector<PathMeasure>& extra) {
    const auto& tree = e.tree();
    std::vector<PathMeasure> c = extra;
    c.push_back(e.active_measure(node, phi));
    for (int j = 0; j < 3; ++j) c.push_back(random_measure(rng, tree.num_leaves(), tree.leaves(node), 0.3));
    c.push_back(random_measure(rng, tree.num_leaves(), {0, tree.num_leaves()}));
    return c;
}

std::vector<PathMeasure> midpoints(const std::vector<PathMeasure>& m) {
    std::vector<PathMeasure> out = m;
    for (std::size_t j = 0; j + 1 < m.size(); ++j) {
        std::vector<double> w(m[j].size());
        for (std::size_t l = 0; l < w.size(); ++l) w[l] = 0.5 * (m[j][l] + m[j + 1][l]);
        out.emplace_back(std::move(w), 1e-9);
    }
    return out;
}

std::string functional_csv(const Functional& phi) {
    io::CsvTable t;
    t.header = {"leaf", "value"};
    for (std::size_t l = 0; l < phi.size(); ++l) t.add({std::to_string(l), io::format_number(phi[l])});
    return t.str();
}

// A few catalogue entries with finite penalty at the node.
std::vector<PathMeasure> finite_sample(Rng& rng, const PenaltyTable& table, NodeId node, std::size_t count) {
    std::vector<PathMeasure> finite;
    for (std::size_t m = 0; m < table.catalogue().size(); ++m)
        if (std::isfinite(table.at(node, m))) finite.push_back(table.catalogue()[m]);
    std::shuffle(finite.begin(), finite.end(), rng);
    if (finite.size() > count) finite.erase(finite.begin() + static_cast<std::ptrdiff_t>(count), finite.end());
    return finite;
}

// Random rectangular family, redrawn until the root has at most `max_members`
// members so that the brute-force stability check stays cheap.
AmbiguitySet bounded_rectangular(Rng& rng, std::size_t max_members) {
    for (;;) {
        const auto tree = random_tree(rng);
        auto set = random_rectangular(rng, tree, 3);
        if (set.members(ScenarioTree::root()).size() <= max_members) return set;
    }
}

// A rectangular family whose root carries at least two distinct members.
AmbiguitySet rectangular_with_spread(Rng& rng, const ScenarioTree& tree) {
    for (;;) {
        auto set = random_rectangular(rng, tree, 2);
        if (set.members(ScenarioTree::root()).size() >= 2) return set;
    }
}

}  // namespace

void run_duality_check(Context& ctx) {
    auto& b = ctx.block();
    const int trees = b.get_int("trees", 20);
    const int functionals = b.get_int("functionals", 5);
    const int marginal_trees = b.get_int("marginal_trees", 5);
    const int randoms = b.get_int("marginal_randoms", 1000);
    const double eps_lo = b.get_positive("epsilon_min", 0.2);
    const double eps_hi = b.get_positive("epsilon_max", 2.0);
    const double roundtrip_tol = b.get_positive("roundtrip_tol", ctx.tol().roundtrip);
    const double marginal_tol = b.get_positive("marginal_tol", ctx.tol().marginal);
    auto bundle = ctx.bundle("bundle", "builtin:binary2");
    b.finish();
    if (trees <= 0 || functionals <= 0 || marginal_trees <= 0 || randoms <= 0)
        throw InvalidInput("[duality-check] counts must be positive");
    if (eps_lo > eps_hi) throw InvalidInput("[duality-check] epsilon_min exceeds epsilon_max");
    const auto& tol = ctx.tol();

    auto report = io::lattice_report_table();

    {
        ScenarioTree one(2, 1);
        EntropicExpectation e(one, PathMeasure::uniform(2), 1.0);
        const double kl = dual_penalty(e, ScenarioTree::root(), PathMeasure::dirac(2, 0));
        const double err = std::abs(kl - std::log(2.0));
        ctx.at_most("duality.kl_fixture", err, roundtrip_tol);
        io::add_lattice_row(report, "duality.kl_fixture", "-1:0", one.time_of(-1), kl, roundtrip_tol,
                            err <= roundtrip_tol);
    }

    Rng rng(ctx.config().seed);
    std::uniform_real_distribution<double> eps_dist(eps_lo, eps_hi);
    double worst_entropic = 0.0, worst_sublinear = 0.0, worst_penalty = 0.0;
    for (int t = 0; t < trees; ++t) {
        const auto tree = random_tree(rng);
        const EntropicExpectation ent(tree, random_measure(rng, tree.num_leaves(), {0, tree.num_leaves()}),
                                      eps_dist(rng));
        const WorstCaseExpectation worst(random_ambiguity(rng, tree, 3));
        const PenaltyExpectation pen(random_penalty(rng, tree, 3));
        double ent_err = 0.0, sub_err = 0.0, pen_err = 0.0;
        for (const auto node : all_nodes(tree))
            for (int f = 0; f < functionals; ++f) {
                const auto phi = random_functional(rng, tree.num_leaves(), 2.0);
                ent_err = std::max(ent_err, roundtrip_error(ent, node, phi, candidates_for(rng, ent, node, phi, {}), tol));
                const auto members = midpoints(worst.set().member_measures(node));
                sub_err = std::max(sub_err,
                                   roundtrip_error(worst, node, phi, candidates_for(rng, worst, node, phi, members), tol));
                const auto sample = finite_sample(rng, pen.table(), node, 3);
                pen_err = std::max(pen_err,
                                   roundtrip_error(pen, node, phi, candidates_for(rng, pen, node, phi, sample), tol));
            }
        const std::string label = "tree" + std::to_string(t);
        io::add_lattice_row(report, "duality.roundtrip_entropic", label, tree.time_of(-1), ent_err, roundtrip_tol,
                            ent_err <= roundtrip_tol);
        io::add_lattice_row(report, "duality.roundtrip_sublinear", label, tree.time_of(-1), sub_err, roundtrip_tol,
                            sub_err <= roundtrip_tol);
        io::add_lattice_row(report, "duality.roundtrip_penalty", label, tree.time_of(-1), pen_err, roundtrip_tol,
                            pen_err <= roundtrip_tol);
        worst_entropic = std::max(worst_entropic, ent_err);
        worst_sublinear = std::max(worst_sublinear, sub_err);
        worst_penalty = std::max(worst_penalty, pen_err);
    }
    ctx.at_most("duality.roundtrip_entropic", worst_entropic, roundtrip_tol);
    ctx.at_most("duality.roundtrip_sublinear", worst_sublinear, roundtrip_tol);
    ctx.at_most("duality.roundtrip_penalty", worst_penalty, roundtrip_tol);

    // The bundle: every family it defines, on its own functionals.
    {
        std::vector<std::unique_ptr<ConditionalExpectation>> families;
        std::vector<std::vector<PathMeasure>> extras;
        if (bundle.ambiguity) families.push_back(std::make_unique<WorstCaseExpectation>(*bundle.ambiguity));
        if (bundle.penalty) families.push_back(std::make_unique<PenaltyExpectation>(*bundle.penalty));
        if (bundle.prior)
            families.push_back(
                std::make_unique<EntropicExpectation>(bundle.tree, (*bundle.catalogue)[*bundle.prior], bundle.epsilon));
        if (families.empty()) throw InvalidInput("bundle defines no expectation ([ambiguity], [penalty] or [prior])");
        if (bundle.functionals.empty()) throw InvalidInput("bundle has no [functionals]");
        double worst = 0.0;
        for (const auto& fam : families)
            for (const auto node : all_nodes(bundle.tree)) {
                double node_err = 0.0;
                for (const auto& [name, phi] : bundle.functionals)
                    node_err = std::max(node_err, roundtrip_error(*fam, node, phi,
                                                                  candidates_for(rng, *fam, node, phi, {}), tol));
                io::add_lattice_row(report, "duality.bundle_roundtrip", node_label(node),
                                    bundle.tree.time_of(node.level), node_err, roundtrip_tol, node_err <= roundtrip_tol);
                worst = std::max(worst, node_err);
            }
        ctx.at_most("duality.bundle_roundtrip", worst, roundtrip_tol);
    }

    // Equal hulls with different vertex lists agree; shrinking one hull is detected.
    double equal_gap = 0.0, separated_gap = std::numeric_limits<double>::infinity(), lp_gap = separated_gap;
    bool all_witnessed = true;
    std::optional<Functional> first_witness;
    for (int t = 0; t < marginal_trees; ++t) {
        const auto tree = random_tree(rng);
        const auto a = rectangular_with_spread(rng, tree);
        const WorstCaseExpectation ea(a);
        const WorstCaseExpectation eb(with_midpoints(a));
        for (int k = -1; k < tree.num_steps(); ++k) {
            const auto r = marginal_uniqueness_check(ea, eb, k, rng(), static_cast<std::size_t>(randoms));
            equal_gap = std::max({equal_gap, r.cylinder_gap, r.random_gap});
        }
        const auto shrunk = shrink_members(a, ScenarioTree::root(), 0.5);
        const WorstCaseExpectation ec(shrunk);
        const auto r = marginal_uniqueness_check(ea, ec, -1, rng(), static_cast<std::size_t>(randoms));
        separated_gap = std::min(separated_gap, r.cylinder_gap);
        all_witnessed = all_witnessed && r.witness.has_value();
        if (r.witness && !first_witness) first_witness = r.witness;
        const auto sep = separating_functional(a.member_measures(ScenarioTree::root()),
                                               shrunk.member_measures(ScenarioTree::root()), tol.hull);
        lp_gap = std::min(lp_gap, sep ? sep->gap : 0.0);
        io::add_lattice_row(report, "marginal.separated", "tree" + std::to_string(t), tree.time_of(-1), r.cylinder_gap,
                            marginal_tol, r.cylinder_gap > marginal_tol);
    }
    ctx.at_most("marginal.equal_hulls", equal_gap, marginal_tol);
    ctx.record("marginal.separated", separated_gap, marginal_tol, all_witnessed && separated_gap > marginal_tol);
    ctx.above("marginal.lp_witness", lp_gap, tol.hull);
    if (first_witness) ctx.write("separating_functional.csv", functional_csv(*first_witness));

    ctx.write("lattice_report.csv", report.str());
}

void run_tower_check(Context& ctx) {
    auto& b = ctx.block();
    const int families = b.get_int("families", 20);
    const int max_members = b.get_int("max_members", 256);
    const int functionals = b.get_int("functionals", 10);
    const double tower_tol = b.get_positive("tower_tol", ctx.tol().exact);
    const double nonstable_threshold = b.get_positive("nonstable_threshold", 1e-3);
    auto stable = ctx.bundle("bundle", "builtin:binary2");
    auto nonstable = ctx.bundle("nonstable", "builtin:nonstable");
    b.finish();
    if (families <= 0 || functionals <= 0 || max_members <= 0) throw InvalidInput("[tower-check] counts must be positive");
    if (!stable.ambiguity || !nonstable.ambiguity) throw InvalidInput("tower-check bundles need an [ambiguity] section");
    const auto& tol = ctx.tol();

    auto report = io::lattice_report_table();
    Rng rng(ctx.config().seed);

    double worst_tower = 0.0;
    int unstable = 0;
    for (int f = 0; f < families; ++f) {
        const auto set = bounded_rectangular(rng, static_cast<std::size_t>(max_members));
        const auto& tree = set.tree();
        const WorstCaseExpectation e(set);
        double res = 0.0;
        for (int j = 0; j < functionals; ++j)
            res = std::max(res, max_tower_residual(e, random_functional(rng, tree.num_leaves(), 2.0)));
        const bool stable_ok = check_stability(set, tol).pass();
        unstable += stable_ok ? 0 : 1;
        worst_tower = std::max(worst_tower, res);
        io::add_lattice_row(report, "tower.stable_families", "family" + std::to_string(f), tree.time_of(-1), res,
                            tower_tol, res <= tower_tol && stable_ok);
    }
    ctx.at_most("tower.stable_families", worst_tower, tower_tol);
    ctx.at_most("tower.stability_random", unstable, 0.0);

    auto bundle_tower = [&](const io::Bundle& bd, const std::string& check, double limit, bool expect_small) {
        const WorstCaseExpectation e(*bd.ambiguity);
        double worst = 0.0;
        for (int k = -1; k < bd.tree.num_steps(); ++k)
            for (int s = k + 1; s < bd.tree.num_steps(); ++s)
                for (std::size_t i = 0; i < bd.tree.nodes_at(k); ++i) {
                    double res = 0.0;
                    for (const auto& [name, phi] : bd.functionals) res = std::max(res, tower_residual(e, s, {k, i}, phi));
                    worst = std::max(worst, res);
                    io::add_lattice_row(report, check, node_label({k, i}) + ">" + std::to_string(s),
                                        bd.tree.time_of(k), res, limit, expect_small ? res <= limit : res > limit);
                }
        return worst;
    };

    if (stable.functionals.empty() || nonstable.functionals.empty())
        throw InvalidInput("tower-check bundles need [functionals]");
    ctx.at_most("tower.bundle_stable", bundle_tower(stable, "tower.bundle_stable", tower_tol, true), tower_tol);
    const auto stable_report = check_stability(*stable.ambiguity, tol);
    ctx.record("stability.bundle_stable", stable_report.worst_distance, tol.hull, stable_report.pass());

    ctx.above("tower.nonstable_fixture",
              bundle_tower(nonstable, "tower.nonstable_fixture", nonstable_threshold, false), nonstable_threshold);
    const auto bad = check_stability(*nonstable.ambiguity, tol);
    ctx.record("stability.nonstable_witness", bad.worst_distance, tol.hull, !bad.pass() && !bad.witness.empty());

    std::ostringstream witness;
    witness << "bundle " << (bad.pass() ? "stable" : "not stable") << "\n";
    if (!bad.witness.empty()) witness << bad.witness << "\n";
    ctx.write("stability_witness.txt", witness.str());

    // Shift homogeneity: an iid family is homogeneous, a level-dependent one is not.
    {
        const ScenarioTree tree(2, 3);
        const auto iid = rectangular_ambiguity(tree, [](NodeId) {
            return std::vector<std::vector<double>>{{0.4, 0.6}, {0.6, 0.4}};
        });
        const auto drifting = rectangular_ambiguity(tree, [](NodeId n) {
            const double p = 0.3 + 0.1 * (n.level + 1);
            return std::vector<std::vector<double>>{{p, 1.0 - p}};
        });
        const WorstCaseExpectation e_iid(iid), e_drift(drifting);
        double res_iid = 0.0, res_drift = 0.0;
        for (int j = 0; j < functionals; ++j) {
            const auto phi = random_functional(rng, tree.num_leaves(), 1.0);
            res_iid = std::max(res_iid, shift_homogeneity_residual(e_iid, 1, phi));
            res_drift = std::max(res_drift, shift_homogeneity_residual(e_drift, 1, phi));
        }
        ctx.at_most("shift.iid_family", res_iid, tower_tol);
        ctx.above("shift.time_varying", res_drift, 1e-6);
    }

    ctx.write("lattice_report.csv", report.str());
}

}  // namespace nlx::cli
