#include "nlx/lattice/expectations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlx/core/errors.hpp"
#include "nlx/lattice/pasting.hpp"

namespace nlx::lattice {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dims(const ScenarioTree& tree, const Functional& phi) {
    if (phi.size() != tree.num_leaves()) throw InvalidInput("functional does not match the tree");
}

void check_catalogue(const ScenarioTree& tree, const MeasureCatalogue& cat) {
    for (const auto& p : cat)
        if (p.size() != tree.num_leaves()) throw InvalidInput("catalogue measure does not match the tree");
}

}  // namespace

std::vector<double> evaluate_level(const ConditionalExpectation& e, int level, const Functional& phi) {
    const std::size_t n = e.tree().nodes_at(level);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = e.evaluate({level, i}, phi);
    return out;
}

Functional lift(const ScenarioTree& tree, int level, std::span<const double> node_values) {
    if (node_values.size() != tree.nodes_at(level)) throw InvalidInput("node values do not match the level");
    std::vector<double> v(tree.num_leaves());
    for (std::size_t leaf = 0; leaf < v.size(); ++leaf) v[leaf] = node_values[tree.ancestor(leaf, level).index];
    return Functional(std::move(v));
}

// ---------------------------------------------------------------------------
// PenaltyTable / AmbiguitySet

PenaltyTable::PenaltyTable(ScenarioTree tree, std::shared_ptr<const MeasureCatalogue> catalogue)
    : tree_(std::move(tree)), catalogue_(std::move(catalogue)) {
    if (!catalogue_) throw InvalidInput("penalty table needs a catalogue");
    check_catalogue(tree_, *catalogue_);
    entries_.assign(tree_.num_slots() * catalogue_->size(), kInf);
}

void PenaltyTable::set(NodeId node, std::size_t measure, double value) {
    if (measure >= catalogue_->size()) throw InvalidInput("penalty for unknown measure");
    if (std::isnan(value) || value < 0.0) throw InvalidInput("penalty values must lie in [0, +inf]");
    entries_[tree_.slot(node) * catalogue_->size() + measure] = value;
}

double PenaltyTable::at(NodeId node, std::size_t measure) const {
    if (measure >= catalogue_->size()) throw InvalidInput("penalty for unknown measure");
    return entries_[tree_.slot(node) * catalogue_->size() + measure];
}

std::vector<std::string> PenaltyTable::violations(double tol) const {
    std::vector<std::string> out;
    for (int level = -1; level < tree_.num_steps(); ++level) {
        for (std::size_t i = 0; i < tree_.nodes_at(level); ++i) {
            const NodeId node{level, i};
            const LeafRange range = tree_.leaves(node);
            double lowest = kInf;
            for (std::size_t m = 0; m < catalogue_->size(); ++m) {
                const double a = at(node, m);
                lowest = std::min(lowest, a);
                if (std::isfinite(a) && !(*catalogue_)[m].supported_on(range, tol))
                    out.push_back("node (" + std::to_string(level) + "," + std::to_string(i) + "): measure " +
                                  std::to_string(m) + " has finite penalty but charges leaves outside the node");
            }
            if (!(std::abs(lowest) <= tol))
                out.push_back("node (" + std::to_string(level) + "," + std::to_string(i) +
                              "): minimal penalty is not 0");
        }
    }
    return out;
}

AmbiguitySet::AmbiguitySet(ScenarioTree tree, std::shared_ptr<const MeasureCatalogue> catalogue)
    : tree_(std::move(tree)), catalogue_(std::move(catalogue)) {
    if (!catalogue_) throw InvalidInput("ambiguity set needs a catalogue");
    check_catalogue(tree_, *catalogue_);
    members_.resize(tree_.num_slots());
}

void AmbiguitySet::assign(NodeId node, std::vector<std::size_t> ids, double tol) {
    if (ids.empty()) throw InvalidInput("ambiguity set must be nonempty at every node");
    const LeafRange range = tree_.leaves(node);
    std::vector<std::size_t> unique;
    for (std::size_t id : ids) {
        if (id >= catalogue_->size()) throw InvalidInput("ambiguity set references unknown measure");
        if (!(*catalogue_)[id].supported_on(range, tol))
            throw InvalidInput("ambiguity member " + std::to_string(id) + " charges leaves outside its node");
        if (std::find(unique.begin(), unique.end(), id) == unique.end()) unique.push_back(id);
    }
    members_[tree_.slot(node)] = std::move(unique);
}

std::span<const std::size_t> AmbiguitySet::members(NodeId node) const {
    const auto& m = members_[tree_.slot(node)];
    if (m.empty()) throw InvalidInput("ambiguity set is empty at the requested node");
    return m;
}

std::vector<PathMeasure> AmbiguitySet::member_measures(NodeId node) const {
    std::vector<PathMeasure> out;
    for (std::size_t id : members(node)) out.push_back((*catalogue_)[id]);
    return out;
}

bool AmbiguitySet::assigned(NodeId node) const { return !members_[tree_.slot(node)].empty(); }

PenaltyTable indicator_penalty(const AmbiguitySet& set) {
    PenaltyTable table(set.tree(), set.catalogue_ptr());
    const auto& tree = set.tree();
    for (int level = -1; level < tree.num_steps(); ++level)
        for (std::size_t i = 0; i < tree.nodes_at(level); ++i)
            if (set.assigned({level, i}))
                for (std::size_t id : set.members({level, i})) table.set({level, i}, id, 0.0);
    return table;
}

// ---------------------------------------------------------------------------
// Dual formulas

std::size_t convex_argmax(const PenaltyTable& alpha, NodeId node, const Functional& phi) {
    check_dims(alpha.tree(), phi);
    const auto& cat = alpha.catalogue();
    if (cat.empty()) throw InvalidInput("empty measure catalogue");
    double best = -kInf;
    std::size_t arg = cat.size();
    for (std::size_t m = 0; m < cat.size(); ++m) {
        const double a = alpha.at(node, m);
        if (!std::isfinite(a)) continue;
        const double v = expected_value(cat[m], phi) - a;
        if (v > best) {
            best = v;
            arg = m;
        }
    }
    if (arg == cat.size()) throw InvalidInput("every penalty is +inf at the node (minimal penalty must be 0)");
    return arg;
}

double convex_expectation(const PenaltyTable& alpha, NodeId node, const Functional& phi) {
    const std::size_t m = convex_argmax(alpha, node, phi);
    return expected_value(alpha.catalogue()[m], phi) - alpha.at(node, m);
}

std::size_t sublinear_argmax(const AmbiguitySet& set, NodeId node, const Functional& phi) {
    check_dims(set.tree(), phi);
    const auto ids = set.members(node);
    double best = -kInf;
    std::size_t arg = ids.front();
    for (std::size_t id : ids) {
        const double v = expected_value(set.catalogue()[id], phi);
        if (v > best || (v == best && id < arg)) {
            best = v;
            arg = id;
        }
    }
    return arg;
}

double sublinear_expectation(const AmbiguitySet& set, NodeId node, const Functional& phi) {
    return expected_value(set.catalogue()[sublinear_argmax(set, node, phi)], phi);
}

// ---------------------------------------------------------------------------
// Families

LinearExpectation::LinearExpectation(ScenarioTree tree, PathMeasure prior)
    : tree_(std::move(tree)), prior_(std::move(prior)) {
    if (prior_.size() != tree_.num_leaves()) throw InvalidInput("prior does not match the tree");
}

double LinearExpectation::evaluate(NodeId node, const Functional& phi) const {
    check_dims(tree_, phi);
    return expected_value(conditional(tree_, prior_, node), phi);
}

PathMeasure LinearExpectation::active_measure(NodeId node, const Functional&) const {
    return conditional(tree_, prior_, node);
}

double PenaltyExpectation::evaluate(NodeId node, const Functional& phi) const {
    return convex_expectation(table_, node, phi);
}

PathMeasure PenaltyExpectation::active_measure(NodeId node, const Functional& phi) const {
    return table_.catalogue()[convex_argmax(table_, node, phi)];
}

double WorstCaseExpectation::evaluate(NodeId node, const Functional& phi) const {
    return sublinear_expectation(set_, node, phi);
}

PathMeasure WorstCaseExpectation::active_measure(NodeId node, const Functional& phi) const {
    return set_.catalogue()[sublinear_argmax(set_, node, phi)];
}

EntropicExpectation::EntropicExpectation(ScenarioTree tree, PathMeasure prior, double eps)
    : tree_(std::move(tree)), prior_(std::move(prior)), eps_(eps) {
    if (prior_.size() != tree_.num_leaves()) throw InvalidInput("prior does not match the tree");
    if (!(eps_ > 0.0)) throw InvalidInput("entropic expectation needs eps > 0");
}

double EntropicExpectation::evaluate(NodeId node, const Functional& phi) const {
    check_dims(tree_, phi);
    return entropic_expectation(conditional(tree_, prior_, node), eps_, phi);
}

PathMeasure EntropicExpectation::active_measure(NodeId node, const Functional& phi) const {
    check_dims(tree_, phi);
    const PathMeasure q = conditional(tree_, prior_, node);
    double top = -kInf;
    for (std::size_t i = 0; i < q.size(); ++i)
        if (q[i] > 0.0) top = std::max(top, phi[i]);
    std::vector<double> w(q.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] > 0.0) w[i] = q[i] * std::exp((phi[i] - top) / eps_);
        total += w[i];
    }
    for (double& x : w) x /= total;
    return PathMeasure(std::move(w), 1e-9);
}

}  // namespace nlx::lattice
