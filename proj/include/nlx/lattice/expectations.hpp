#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nlx/lattice/measure.hpp"
#include "nlx/lattice/scenario_tree.hpp"

namespace nlx::lattice {

/// A family (node -> E_node) of conditional nonlinear expectations on a tree.
class ConditionalExpectation {
public:
    virtual ~ConditionalExpectation() = default;

    [[nodiscard]] virtual const ScenarioTree& tree() const = 0;
    [[nodiscard]] virtual double evaluate(NodeId node, const Functional& phi) const = 0;
    /// A measure attaining the supremum in the dual representation at `phi`
    /// (a supergradient of phi -> E_node(phi)).
    [[nodiscard]] virtual PathMeasure active_measure(NodeId node, const Functional& phi) const = 0;
    [[nodiscard]] virtual bool positively_homogeneous() const { return false; }
};

/// E_level(phi) at every node of `level`, by node index.
[[nodiscard]] std::vector<double> evaluate_level(const ConditionalExpectation& e, int level, const Functional& phi);

/// Re-reads node values at `level` as a functional: each leaf takes its ancestor's value.
[[nodiscard]] Functional lift(const ScenarioTree& tree, int level, std::span<const double> node_values);

/// alpha(t, node, measure) in [0, +inf] over a finite catalogue of measures.
class PenaltyTable {
public:
    PenaltyTable(ScenarioTree tree, std::shared_ptr<const MeasureCatalogue> catalogue);

    void set(NodeId node, std::size_t measure, double value);
    [[nodiscard]] double at(NodeId node, std::size_t measure) const;

    [[nodiscard]] const ScenarioTree& tree() const noexcept { return tree_; }
    [[nodiscard]] const MeasureCatalogue& catalogue() const noexcept { return *catalogue_; }
    [[nodiscard]] std::shared_ptr<const MeasureCatalogue> catalogue_ptr() const noexcept { return catalogue_; }

    /// Human-readable violations: a node whose minimal penalty is not 0, or a
    /// finite penalty on a measure not supported on the node.
    [[nodiscard]] std::vector<std::string> violations(double tol = 1e-12) const;

private:
    ScenarioTree tree_;
    std::shared_ptr<const MeasureCatalogue> catalogue_;
    std::vector<double> entries_;  // slot-major, catalogue-minor
};

/// Per node, the catalogue ids whose convex hull is the uncertainty set.
class AmbiguitySet {
public:
    AmbiguitySet(ScenarioTree tree, std::shared_ptr<const MeasureCatalogue> catalogue);

    /// Deduplicates `ids`; throws InvalidInput for an empty list, an unknown
    /// id, or a measure that charges leaves outside `node`.
    void assign(NodeId node, std::vector<std::size_t> ids, double tol = 1e-12);
    [[nodiscard]] std::span<const std::size_t> members(NodeId node) const;
    [[nodiscard]] std::vector<PathMeasure> member_measures(NodeId node) const;
    [[nodiscard]] bool assigned(NodeId node) const;

    [[nodiscard]] const ScenarioTree& tree() const noexcept { return tree_; }
    [[nodiscard]] const MeasureCatalogue& catalogue() const noexcept { return *catalogue_; }
    [[nodiscard]] std::shared_ptr<const MeasureCatalogue> catalogue_ptr() const noexcept { return catalogue_; }

private:
    ScenarioTree tree_;
    std::shared_ptr<const MeasureCatalogue> catalogue_;
    std::vector<std::vector<std::size_t>> members_;  // by slot
};

/// The {0, +inf}-valued penalty of an ambiguity set.
[[nodiscard]] PenaltyTable indicator_penalty(const AmbiguitySet& set);

/// sup over the catalogue of E^P[phi] - alpha(node, P). Ties go to the lowest
/// catalogue index. Throws InvalidInput for an empty catalogue or a node where
/// every penalty is +inf.
[[nodiscard]] double convex_expectation(const PenaltyTable& alpha, NodeId node, const Functional& phi);
[[nodiscard]] std::size_t convex_argmax(const PenaltyTable& alpha, NodeId node, const Functional& phi);

/// max of E^P[phi] over the node's members.
[[nodiscard]] double sublinear_expectation(const AmbiguitySet& set, NodeId node, const Functional& phi);
[[nodiscard]] std::size_t sublinear_argmax(const AmbiguitySet& set, NodeId node, const Functional& phi);

/// Conditional expectations of a single prior.
class LinearExpectation final : public ConditionalExpectation {
public:
    LinearExpectation(ScenarioTree tree, PathMeasure prior);

    [[nodiscard]] const ScenarioTree& tree() const override { return tree_; }
    [[nodiscard]] double evaluate(NodeId node, const Functional& phi) const override;
    [[nodiscard]] PathMeasure active_measure(NodeId node, const Functional& phi) const override;
    [[nodiscard]] bool positively_homogeneous() const override { return true; }
    [[nodiscard]] const PathMeasure& prior() const noexcept { return prior_; }

private:
    ScenarioTree tree_;
    PathMeasure prior_;
};

class PenaltyExpectation final : public ConditionalExpectation {
public:
    explicit PenaltyExpectation(PenaltyTable table) : table_(std::move(table)) {}

    [[nodiscard]] const ScenarioTree& tree() const override { return table_.tree(); }
    [[nodiscard]] double evaluate(NodeId node, const Functional& phi) const override;
    [[nodiscard]] PathMeasure active_measure(NodeId node, const Functional& phi) const override;
    [[nodiscard]] const PenaltyTable& table() const noexcept { return table_; }

private:
    PenaltyTable table_;
};

class WorstCaseExpectation final : public ConditionalExpectation {
public:
    explicit WorstCaseExpectation(AmbiguitySet set) : set_(std::move(set)) {}

    [[nodiscard]] const ScenarioTree& tree() const override { return set_.tree(); }
    [[nodiscard]] double evaluate(NodeId node, const Functional& phi) const override;
    [[nodiscard]] PathMeasure active_measure(NodeId node, const Functional& phi) const override;
    [[nodiscard]] bool positively_homogeneous() const override { return true; }
    [[nodiscard]] const AmbiguitySet& set() const noexcept { return set_; }

private:
    AmbiguitySet set_;
};

/// eps * log E^{Q(.|node)}[exp(phi / eps)] for a reference prior Q.
class EntropicExpectation final : public ConditionalExpectation {
public:
    EntropicExpectation(ScenarioTree tree, PathMeasure prior, double eps);

    [[nodiscard]] const ScenarioTree& tree() const override { return tree_; }
    [[nodiscard]] double evaluate(NodeId node, const Functional& phi) const override;
    /// The Gibbs measure proportional to Q(.|node) exp(phi / eps).
    [[nodiscard]] PathMeasure active_measure(NodeId node, const Functional& phi) const override;
    [[nodiscard]] const PathMeasure& prior() const noexcept { return prior_; }
    [[nodiscard]] double epsilon() const noexcept { return eps_; }

private:
    ScenarioTree tree_;
    PathMeasure prior_;
    double eps_;
};

}  // namespace nlx::lattice
