#include "nlx/lattice/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nlx/core/errors.hpp"
#include "nlx/lattice/duality.hpp"
#include "nlx/lattice/pasting.hpp"

namespace nlx::lattice {

double tower_residual(const ConditionalExpectation& e, int s, NodeId node, const Functional& phi) {
    const auto& tree = e.tree();
    tree.require(node);
    if (s <= node.level || s >= tree.num_steps()) throw InvalidInput("tower residual needs t < s within the window");
    const auto inner = evaluate_level(e, s, phi);
    const Functional nested = lift(tree, s, inner);
    return std::abs(e.evaluate(node, nested) - e.evaluate(node, phi));
}

double max_tower_residual(const ConditionalExpectation& e, const Functional& phi) {
    const auto& tree = e.tree();
    double worst = 0.0;
    for (int s = 0; s < tree.num_steps(); ++s) {
        const Functional nested = lift(tree, s, evaluate_level(e, s, phi));
        for (int t = -1; t < s; ++t)
            for (std::size_t i = 0; i < tree.nodes_at(t); ++i) {
                const NodeId n{t, i};
                worst = std::max(worst, std::abs(e.evaluate(n, nested) - e.evaluate(n, phi)));
            }
    }
    return worst;
}

namespace {

std::string describe(NodeId n) {
    std::ostringstream os;
    os << "(level " << n.level << ", node " << n.index << ")";
    return os.str();
}

void merge(StabilityReport& into, const StabilityReport& r) {
    into.conditioning_stable = into.conditioning_stable && r.conditioning_stable;
    into.pasting_stable = into.pasting_stable && r.pasting_stable;
    if (r.worst_distance > into.worst_distance) {
        into.worst_distance = r.worst_distance;
        into.witness = r.witness;
    }
}

}  // namespace

StabilityReport check_stability(const AmbiguitySet& set, int t, int s, const Tolerances& tol,
                                std::size_t max_kernels) {
    const auto& tree = set.tree();
    if (!(t < s) || t < -1 || s >= tree.num_steps()) throw InvalidInput("stability check needs -1 <= t < s < steps");
    StabilityReport report;
    auto record = [&](double dist, const std::string& what) {
        if (dist > report.worst_distance) {
            report.worst_distance = dist;
            report.witness = what;
        }
    };
    for (std::size_t i = 0; i < tree.nodes_at(t); ++i) {
        const NodeId node{t, i};
        const auto outer = set.member_measures(node);
        const auto below = tree.descendants(node, s);
        std::vector<std::vector<PathMeasure>> later;
        later.reserve(below.size());
        for (const auto& m : below) later.push_back(set.member_measures(m));

        // Conditioning.
        for (std::size_t a = 0; a < outer.size(); ++a)
            for (std::size_t b = 0; b < below.size(); ++b) {
                if (outer[a].mass(tree.leaves(below[b])) <= tol.exact) continue;
                const double dist = hull_distance(later[b], conditional(tree, outer[a], below[b]));
                if (dist > tol.hull) {
                    report.conditioning_stable = false;
                    record(dist, "conditional of member " + std::to_string(a) + " at " + describe(node) +
                                     " leaves the hull at " + describe(below[b]));
                }
            }

        // Pasting on vertex kernels, enumerated as a mixed-radix counter.
        std::size_t count = 1;
        for (const auto& v : later) {
            if (count > max_kernels / v.size()) throw NumericRefusal("too many vertex kernels for the pasting check");
            count *= v.size();
        }
        Kernel kernel;
        kernel.level = s;
        const std::size_t first = below.front().index;
        std::vector<std::size_t> digit(below.size(), 0);
        for (std::size_t k = 0; k < count; ++k) {
            // Kernel entries for nodes outside `node` are irrelevant: P puts no mass there.
            kernel.by_node.clear();
            for (std::size_t j = 0; j < tree.nodes_at(s); ++j) {
                if (j >= first && j < first + below.size())
                    kernel.by_node.push_back(later[j - first][digit[j - first]]);
                else
                    kernel.by_node.push_back(PathMeasure::uniform_on(tree.num_leaves(), tree.leaves({s, j})));
            }
            for (std::size_t a = 0; a < outer.size(); ++a) {
                const PathMeasure pasted = paste_measures(tree, outer[a], kernel, tol.hull);
                const double dist = hull_distance(outer, pasted);
                if (dist > tol.hull) {
                    report.pasting_stable = false;
                    std::ostringstream os;
                    os << "member " << a << " at " << describe(node) << " pasted with vertices (";
                    for (std::size_t j = 0; j < digit.size(); ++j) os << (j ? " " : "") << digit[j];
                    os << ") at level " << s << " leaves the hull";
                    record(dist, os.str());
                }
            }
            for (std::size_t j = 0; j < digit.size(); ++j) {
                if (++digit[j] < later[j].size()) break;
                digit[j] = 0;
            }
        }
    }
    return report;
}

StabilityReport check_stability(const AmbiguitySet& set, const Tolerances& tol) {
    StabilityReport all;
    const int steps = set.tree().num_steps();
    for (int t = -1; t < steps; ++t)
        for (int s = t + 1; s < steps; ++s) merge(all, check_stability(set, t, s, tol));
    return all;
}

std::vector<Functional> cylinder_indicators(const ScenarioTree& tree) {
    const int steps = tree.num_steps();
    const int m = tree.num_states();
    std::vector<Functional> out;
    std::vector<std::vector<int>> paths;
    for (std::size_t leaf = 0; leaf < tree.num_leaves(); ++leaf) paths.push_back(tree.path(leaf));
    for (unsigned mask = 1; mask < (1u << steps); ++mask) {
        std::vector<int> coords;
        for (int k = 0; k < steps; ++k)
            if (mask & (1u << k)) coords.push_back(k);
        std::vector<int> value(coords.size(), 0);
        while (true) {
            std::vector<double> f(tree.num_leaves(), 0.0);
            for (std::size_t leaf = 0; leaf < paths.size(); ++leaf) {
                bool hit = true;
                for (std::size_t c = 0; c < coords.size() && hit; ++c)
                    hit = paths[leaf][static_cast<std::size_t>(coords[c])] == value[c];
                f[leaf] = hit ? 1.0 : 0.0;
            }
            out.emplace_back(std::move(f));
            std::size_t c = 0;
            for (; c < value.size(); ++c) {
                if (++value[c] < m) break;
                value[c] = 0;
            }
            if (c == value.size()) break;
        }
    }
    return out;
}

MarginalReport marginal_uniqueness_check(const ConditionalExpectation& e1, const ConditionalExpectation& e2,
                                         int level, std::uint64_t seed, std::size_t num_random) {
    const auto& tree = e1.tree();
    if (!(tree == e2.tree())) throw InvalidInput("expectations live on different trees");
    MarginalReport report;
    auto compare = [&](const Functional& f, double& gap, bool cylinder) {
        for (std::size_t i = 0; i < tree.nodes_at(level); ++i) {
            const NodeId n{level, i};
            const double d = std::abs(e1.evaluate(n, f) - e2.evaluate(n, f));
            if (d > gap) {
                gap = d;
                if (cylinder) {
                    report.witness = f;
                    report.witness_node = n;
                }
            }
        }
    };
    for (const auto& f : cylinder_indicators(tree)) {
        compare(f, report.cylinder_gap, true);
        compare(affine(f, -1.0, 0.0), report.cylinder_gap, true);
        report.cylinders_tested += 2;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t r = 0; r < num_random; ++r) {
        std::vector<double> v(tree.num_leaves());
        for (auto& x : v) x = u(rng);
        compare(Functional(std::move(v)), report.random_gap, false);
        ++report.randoms_tested;
    }
    return report;
}

double shift_homogeneity_residual(const ConditionalExpectation& e, int shift, const Functional& phi) {
    const auto& tree = e.tree();
    const int steps = tree.num_steps();
    if (shift < 0 || shift >= steps) throw InvalidInput("shift leaves the time window");
    if (phi.size() != tree.num_leaves()) throw InvalidInput("functional does not match the tree");
    double worst = 0.0;
    for (int k = shift - 1; k < steps; ++k) {
        for (std::size_t i = 0; i < tree.nodes_at(k); ++i) {
            const NodeId n{k, i};
            const auto hist = tree.history(n);
            const std::vector<int> prefix(hist.begin(), hist.begin() + shift);
            const std::vector<int> tail(hist.begin() + shift, hist.end());
            std::vector<double> shifted(tree.num_leaves());
            for (std::size_t leaf = 0; leaf < tree.num_leaves(); ++leaf) {
                const auto w = tree.path(leaf);
                std::vector<int> full(prefix);
                full.insert(full.end(), w.begin(), w.end() - shift);
                shifted[leaf] = phi[tree.leaf_of(full)];
            }
            const double lhs = e.evaluate(n, phi);
            const double rhs = e.evaluate(tree.node_of(tail), Functional(std::move(shifted)));
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

PathMeasure product_measure(const ScenarioTree& tree, NodeId node,
                            const std::function<const std::vector<double>&(NodeId)>& step) {
    tree.require(node);
    const int steps = tree.num_steps();
    std::vector<double> w(tree.num_leaves(), 0.0);
    const LeafRange range = tree.leaves(node);
    for (std::size_t leaf = range.begin; leaf < range.end; ++leaf) {
        double p = 1.0;
        for (int k = node.level; k < steps - 1 && p > 0.0; ++k) {
            const NodeId at = k < 0 ? ScenarioTree::root() : tree.ancestor(leaf, k);
            const auto& dist = step(at);
            if (dist.size() != static_cast<std::size_t>(tree.num_states()))
                throw InvalidInput("transition has the wrong number of states");
            p *= dist[static_cast<std::size_t>(tree.path(leaf)[static_cast<std::size_t>(k + 1)])];
        }
        w[leaf] = p;
    }
    return PathMeasure(std::move(w), 1e-9);
}

AmbiguitySet rectangular_ambiguity(const ScenarioTree& tree, const StepVertices& vertices, std::size_t max_members) {
    const int steps = tree.num_steps();
    // Vertex sets by slot for every internal node.
    std::vector<std::vector<std::vector<double>>> sets(tree.num_slots());
    for (int k = -1; k < steps - 1; ++k)
        for (std::size_t i = 0; i < tree.nodes_at(k); ++i) {
            const NodeId n{k, i};
            auto v = vertices(n);
            if (v.empty()) throw InvalidInput("empty transition set at " + describe(n));
            sets[tree.slot(n)] = std::move(v);
        }

    auto catalogue = std::make_shared<MeasureCatalogue>();
    std::vector<std::pair<NodeId, std::vector<std::size_t>>> assignments;
    for (int k = -1; k < steps; ++k)
        for (std::size_t i = 0; i < tree.nodes_at(k); ++i) {
            const NodeId n{k, i};
            std::vector<NodeId> internal;
            for (int l = k; l < steps - 1; ++l) {
                if (l == -1) {
                    internal.push_back(ScenarioTree::root());
                    continue;
                }
                const auto d = tree.descendants(n, l);
                internal.insert(internal.end(), d.begin(), d.end());
            }
            std::size_t count = 1;
            for (const auto& m : internal) {
                const std::size_t c = sets[tree.slot(m)].size();
                if (count > max_members / c) throw NumericRefusal("rectangular set has too many vertices");
                count *= c;
            }
            std::vector<std::size_t> choice(tree.num_slots(), 0);
            std::vector<std::size_t> ids;
            for (std::size_t c = 0; c < count; ++c) {
                std::size_t code = c;
                for (const auto& m : internal) {
                    const std::size_t slot = tree.slot(m);
                    choice[slot] = code % sets[slot].size();
                    code /= sets[slot].size();
                }
                ids.push_back(catalogue->size());
                catalogue->push_back(product_measure(tree, n, [&](NodeId at) -> const std::vector<double>& {
                    const std::size_t slot = tree.slot(at);
                    return sets[slot][choice[slot]];
                }));
            }
            assignments.emplace_back(n, std::move(ids));
        }

    AmbiguitySet set(tree, catalogue);
    for (auto& [n, ids] : assignments) set.assign(n, std::move(ids), 1e-9);
    return set;
}

namespace {

template <class Edit>
AmbiguitySet rebuild(const AmbiguitySet& set, Edit edit) {
    const auto& tree = set.tree();
    auto cat = std::make_shared<MeasureCatalogue>(set.catalogue());
    std::vector<std::pair<NodeId, std::vector<std::size_t>>> rows;
    for (int k = -1; k < tree.num_steps(); ++k)
        for (std::size_t i = 0; i < tree.nodes_at(k); ++i) {
            const NodeId n{k, i};
            const auto m = set.members(n);
            std::vector<std::size_t> ids(m.begin(), m.end());
            edit(n, ids, *cat);
            rows.emplace_back(n, std::move(ids));
        }
    AmbiguitySet out(tree, cat);
    for (auto& [n, ids] : rows) out.assign(n, std::move(ids), 1e-9);
    return out;
}

}  // namespace

AmbiguitySet with_midpoints(const AmbiguitySet& set) {
    return rebuild(set, [](NodeId, std::vector<std::size_t>& ids, MeasureCatalogue& cat) {
        const std::size_t n = ids.size();
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const auto& a = cat[ids[j]];
            const auto& b = cat[ids[j + 1]];
            std::vector<double> w(a.size());
            for (std::size_t l = 0; l < w.size(); ++l) w[l] = 0.5 * (a[l] + b[l]);
            ids.push_back(cat.size());
            cat.emplace_back(std::move(w), 1e-9);
        }
    });
}

AmbiguitySet shrink_members(const AmbiguitySet& set, NodeId node, double factor) {
    if (!(factor >= 0.0 && factor <= 1.0)) throw InvalidInput("shrink factor must lie in [0, 1]");
    set.tree().require(node);
    return rebuild(set, [&](NodeId n, std::vector<std::size_t>& ids, MeasureCatalogue& cat) {
        if (!(n == node)) return;
        const std::size_t leaves = cat.front().size();
        std::vector<double> centre(leaves, 0.0);
        for (auto id : ids)
            for (std::size_t l = 0; l < leaves; ++l) centre[l] += cat[id][l] / static_cast<double>(ids.size());
        std::vector<std::size_t> fresh;
        for (auto id : ids) {
            std::vector<double> w(leaves);
            for (std::size_t l = 0; l < leaves; ++l) w[l] = centre[l] + factor * (cat[id][l] - centre[l]);
            fresh.push_back(cat.size());
            cat.emplace_back(std::move(w), 1e-9);
        }
        ids = std::move(fresh);
    });
}

}  // namespace nlx::lattice
