#include "nlx/io/bundle.hpp"

#include <cmath>
#include <limits>

#include "nlx/core/errors.hpp"

namespace nlx::io {
namespace {

using lattice::NodeId;

std::string at_line(const IniDocument& doc, int line) { return doc.origin() + ":" + std::to_string(line); }

NodeId parse_node(const lattice::ScenarioTree& tree, const std::string& level, const std::string& index,
                  const std::string& where) {
    const int l = parse_int(level, where + " level");
    const int i = parse_int(index, where + " node");
    if (i < 0) throw InvalidInput(where + ": negative node index");
    const NodeId n{l, static_cast<std::size_t>(i)};
    if (!tree.contains(n)) throw InvalidInput(where + ": no such node");
    return n;
}

std::size_t parse_id(const std::string& s, std::size_t limit, const std::string& where) {
    const int id = parse_int(s, where + " measure id");
    if (id < 0 || static_cast<std::size_t>(id) >= limit) throw InvalidInput(where + ": unknown measure id " + s);
    return static_cast<std::size_t>(id);
}

std::size_t dirac_id(lattice::MeasureCatalogue& cat, std::size_t leaves, std::size_t leaf) {
    const auto d = lattice::PathMeasure::dirac(leaves, leaf);
    for (std::size_t i = 0; i < cat.size(); ++i)
        if (cat[i] == d) return i;
    cat.push_back(d);
    return cat.size() - 1;
}

}  // namespace

Bundle parse_bundle(const IniDocument& doc) {
    for (const auto& s : doc.sections())
        if (s.name != "tree" && s.name != "measures" && s.name != "ambiguity" && s.name != "penalty" &&
            s.name != "prior" && s.name != "functionals")
            throw InvalidInput(at_line(doc, s.line) + ": unknown bundle section [" + s.name + "]");

    SectionReader tree_sec(doc.find("tree"), "tree");
    if (!tree_sec.present()) throw InvalidInput(doc.origin() + ": bundle has no [tree] section");
    const int states = parse_int(tree_sec.require("states"), "[tree] states");
    const int steps = parse_int(tree_sec.require("steps"), "[tree] steps");
    const int first = tree_sec.get_int("first_time", 0);
    std::vector<int> past;
    for (double v : tree_sec.get_list("past", {})) {
        if (v != std::floor(v)) throw InvalidInput("[tree] past must list integer states");
        past.push_back(static_cast<int>(v));
    }
    tree_sec.finish();

    Bundle b;
    b.tree = lattice::ScenarioTree(states, steps, first, past);
    const std::size_t leaves = b.tree.num_leaves();
    b.catalogue = std::make_shared<lattice::MeasureCatalogue>();

    if (const auto* sec = doc.find("measures")) {
        if (!sec->entries.empty()) throw InvalidInput(at_line(doc, sec->line) + ": [measures] takes rows only");
        for (std::size_t r = 0; r < sec->rows.size(); ++r) {
            const std::string where = at_line(doc, sec->row_lines[r]);
            const auto cells = split(sec->rows[r], ',');
            if (cells.size() != leaves + 1)
                throw InvalidInput(where + ": expected an id and " + std::to_string(leaves) + " weights");
            if (parse_int(cells[0], where) != static_cast<int>(r))
                throw InvalidInput(where + ": measure ids must be 0, 1, 2, ... in order");
            std::vector<double> w;
            for (std::size_t i = 1; i < cells.size(); ++i) w.push_back(parse_double(cells[i], where));
            try {
                b.catalogue->emplace_back(std::move(w), 1e-9);
            } catch (const InvalidInput& e) {
                throw InvalidInput(where + ": " + e.what());
            }
        }
    }
    const std::size_t listed = b.catalogue->size();

    if (const auto* sec = doc.find("ambiguity")) {
        std::vector<std::pair<NodeId, std::vector<std::size_t>>> rows;
        std::vector<bool> seen(b.tree.num_slots(), false);
        for (std::size_t r = 0; r < sec->rows.size(); ++r) {
            const std::string where = at_line(doc, sec->row_lines[r]);
            const auto cells = split(sec->rows[r], ',');
            if (cells.size() != 3) throw InvalidInput(where + ": expected level, node, id;id;...");
            const NodeId n = parse_node(b.tree, cells[0], cells[1], where);
            if (seen[b.tree.slot(n)]) throw InvalidInput(where + ": node listed twice");
            seen[b.tree.slot(n)] = true;
            std::vector<std::size_t> ids;
            for (const auto& id : split(cells[2], ';')) ids.push_back(parse_id(id, listed, where));
            rows.emplace_back(n, std::move(ids));
        }
        for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
            const NodeId n = b.tree.ancestor(leaf, steps - 1);
            if (!seen[b.tree.slot(n)]) rows.emplace_back(n, std::vector<std::size_t>{dirac_id(*b.catalogue, leaves, leaf)});
            seen[b.tree.slot(n)] = true;
        }
        for (int k = -1; k < steps; ++k)
            for (std::size_t i = 0; i < b.tree.nodes_at(k); ++i)
                if (!seen[b.tree.slot({k, i})])
                    throw InvalidInput(doc.origin() + ": [ambiguity] misses node (" + std::to_string(k) + ", " +
                                       std::to_string(i) + ")");
        lattice::AmbiguitySet set(b.tree, b.catalogue);
        for (auto& [n, ids] : rows) set.assign(n, std::move(ids), 1e-9);
        b.ambiguity = std::move(set);
    }

    if (const auto* sec = doc.find("penalty")) {
        struct Entry {
            NodeId node;
            std::size_t id;
            double value;
        };
        std::vector<Entry> entries;
        std::vector<bool> seen(b.tree.num_slots(), false);
        for (std::size_t r = 0; r < sec->rows.size(); ++r) {
            const std::string where = at_line(doc, sec->row_lines[r]);
            const auto cells = split(sec->rows[r], ',');
            if (cells.size() != 4) throw InvalidInput(where + ": expected level, node, id, value");
            const NodeId n = parse_node(b.tree, cells[0], cells[1], where);
            const double v = parse_double(cells[3], where);
            if (v < 0.0) throw InvalidInput(where + ": penalties are nonnegative");
            entries.push_back({n, parse_id(cells[2], listed, where), v});
            seen[b.tree.slot(n)] = true;
        }
        for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
            const NodeId n = b.tree.ancestor(leaf, steps - 1);
            if (!seen[b.tree.slot(n)]) entries.push_back({n, dirac_id(*b.catalogue, leaves, leaf), 0.0});
        }
        lattice::PenaltyTable table(b.tree, b.catalogue);
        for (const auto& e : entries) table.set(e.node, e.id, e.value);
        const auto problems = table.violations(1e-12);
        if (!problems.empty()) throw InvalidInput(doc.origin() + ": [penalty] " + problems.front());
        b.penalty = std::move(table);
    }

    if (const auto* sec = doc.find("prior")) {
        SectionReader prior(sec, "prior");
        b.prior = parse_id(prior.require("measure"), listed, "[prior]");
        b.epsilon = prior.get_positive("epsilon", 1.0);
        prior.finish();
    }

    if (const auto* sec = doc.find("functionals")) {
        for (std::size_t r = 0; r < sec->rows.size(); ++r) {
            const std::string where = at_line(doc, sec->row_lines[r]);
            const auto cells = split(sec->rows[r], ',');
            if (cells.size() != leaves + 1) throw InvalidInput(where + ": expected a name and one value per leaf");
            std::vector<double> v;
            for (std::size_t i = 1; i < cells.size(); ++i) v.push_back(parse_double(cells[i], where));
            b.functionals.emplace_back(cells[0], lattice::Functional(std::move(v)));
        }
    }
    return b;
}

Bundle load_bundle(const std::filesystem::path& path) { return parse_bundle(IniDocument::load(path)); }

}  // namespace nlx::io
