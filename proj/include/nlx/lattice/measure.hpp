#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlx/lattice/scenario_tree.hpp"

namespace nlx::lattice {

/// Probability weights on the leaves of a scenario tree, in leaf order.
class PathMeasure {
public:
    /// Throws InvalidInput unless the weights are nonnegative and sum to 1 within `tol`.
    explicit PathMeasure(std::vector<double> weights, double tol = 1e-12);

    static PathMeasure dirac(std::size_t num_leaves, std::size_t leaf);
    static PathMeasure uniform(std::size_t num_leaves);
    static PathMeasure uniform_on(std::size_t num_leaves, LeafRange range);

    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
    [[nodiscard]] double operator[](std::size_t leaf) const { return weights_[leaf]; }
    [[nodiscard]] double mass(LeafRange range) const;
    [[nodiscard]] bool supported_on(LeafRange range, double tol = 0.0) const;

    friend bool operator==(const PathMeasure&, const PathMeasure&) = default;

private:
    std::vector<double> weights_;
};

using MeasureCatalogue = std::vector<PathMeasure>;

/// Bounded real function on the leaves.
class Functional {
public:
    explicit Functional(std::vector<double> values);

    static Functional constant(std::size_t num_leaves, double c);

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t leaf) const { return values_[leaf]; }
    [[nodiscard]] double bound() const noexcept { return bound_; }

private:
    std::vector<double> values_;
    double bound_ = 0.0;
};

/// Linear expectation: sum of weight * value.
[[nodiscard]] double expected_value(const PathMeasure& p, const Functional& phi);

/// eps * log E^P[exp(phi / eps)] in log-sum-exp form. Throws for eps <= 0.
[[nodiscard]] double entropic_expectation(const PathMeasure& p, double eps, const Functional& phi);

/// Pointwise combinations used by the property suites.
[[nodiscard]] Functional affine(const Functional& phi, double scale, double shift);
[[nodiscard]] Functional mix(const Functional& phi, const Functional& psi, double weight);

}  // namespace nlx::lattice
