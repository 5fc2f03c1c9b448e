#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlx/io/ini.hpp"
#include "nlx/lattice/expectations.hpp"

namespace nlx::io {

/// A scenario bundle:
///
///     [tree]          states, steps, first_time (0), past (optional list)
///     [measures]      rows  id, w_0, ..., w_{L-1}      ids 0, 1, 2, ... in order
///     [ambiguity]     rows  level, node, id;id;...      level -1 is the root
///     [penalty]       rows  level, node, id, value      unlisted entries are +inf
///     [prior]         measure = id, epsilon = value
///     [functionals]   rows  name, v_0, ..., v_{L-1}
///
/// Leaf nodes missing from [ambiguity] or [penalty] get their Dirac measure
/// (penalty 0); internal nodes must be listed.
struct Bundle {
    lattice::ScenarioTree tree{2, 1};
    std::shared_ptr<lattice::MeasureCatalogue> catalogue;
    std::optional<lattice::AmbiguitySet> ambiguity;
    std::optional<lattice::PenaltyTable> penalty;
    std::optional<std::size_t> prior;
    double epsilon = 1.0;
    std::vector<std::pair<std::string, lattice::Functional>> functionals;
};

[[nodiscard]] Bundle parse_bundle(const IniDocument& doc);
[[nodiscard]] Bundle load_bundle(const std::filesystem::path& path);

}  // namespace nlx::io
