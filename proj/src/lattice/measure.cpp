#include "nlx/lattice/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nlx/core/errors.hpp"

namespace nlx::lattice {

PathMeasure::PathMeasure(std::vector<double> weights, double tol) : weights_(std::move(weights)) {
    if (weights_.empty()) throw InvalidInput("path measure needs at least one leaf");
    double total = 0.0;
    for (double w : weights_) {
        if (!std::isfinite(w) || w < 0.0) throw InvalidInput("path measure weights must be finite and nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > tol) throw InvalidInput("path measure weights do not sum to 1");
}

PathMeasure PathMeasure::dirac(std::size_t num_leaves, std::size_t leaf) {
    if (leaf >= num_leaves) throw InvalidInput("dirac leaf out of range");
    std::vector<double> w(num_leaves, 0.0);
    w[leaf] = 1.0;
    return PathMeasure(std::move(w));
}

PathMeasure PathMeasure::uniform(std::size_t num_leaves) {
    return uniform_on(num_leaves, {0, num_leaves});
}

PathMeasure PathMeasure::uniform_on(std::size_t num_leaves, LeafRange range) {
    if (range.size() == 0 || range.end > num_leaves) throw InvalidInput("invalid leaf range");
    std::vector<double> w(num_leaves, 0.0);
    const double v = 1.0 / static_cast<double>(range.size());
    for (std::size_t i = range.begin; i < range.end; ++i) w[i] = v;
    return PathMeasure(std::move(w));
}

double PathMeasure::mass(LeafRange range) const {
    if (range.end > weights_.size()) throw InvalidInput("leaf range exceeds measure");
    return std::accumulate(weights_.begin() + static_cast<std::ptrdiff_t>(range.begin),
                           weights_.begin() + static_cast<std::ptrdiff_t>(range.end), 0.0);
}

bool PathMeasure::supported_on(LeafRange range, double tol) const {
    double outside = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        if (!range.contains(i)) outside += weights_[i];
    return outside <= tol;
}

Functional::Functional(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
        if (!std::isfinite(v)) throw InvalidInput("functional values must be finite");
        bound_ = std::max(bound_, std::abs(v));
    }
}

Functional Functional::constant(std::size_t num_leaves, double c) {
    return Functional(std::vector<double>(num_leaves, c));
}

double expected_value(const PathMeasure& p, const Functional& phi) {
    if (p.size() != phi.size()) throw InvalidInput("measure and functional dimensions differ");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * phi[i];
    return s;
}

double entropic_expectation(const PathMeasure& p, double eps, const Functional& phi) {
    if (!(eps > 0.0)) throw InvalidInput("entropic expectation needs eps > 0");
    if (p.size() != phi.size()) throw InvalidInput("measure and functional dimensions differ");
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) top = std::max(top, phi[i]);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) s += p[i] * std::exp((phi[i] - top) / eps);
    return top + eps * std::log(s);
}

Functional affine(const Functional& phi, double scale, double shift) {
    std::vector<double> v(phi.values().begin(), phi.values().end());
    for (double& x : v) x = scale * x + shift;
    return Functional(std::move(v));
}

Functional mix(const Functional& phi, const Functional& psi, double weight) {
    if (phi.size() != psi.size()) throw InvalidInput("functional dimensions differ");
    std::vector<double> v(phi.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = weight * phi[i] + (1.0 - weight) * psi[i];
    return Functional(std::move(v));
}

}  // namespace nlx::lattice
