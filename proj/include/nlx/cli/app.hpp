#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlx/core/tolerances.hpp"
#include "nlx/io/ini.hpp"
#include "nlx/io/report.hpp"

namespace nlx::cli {

/// Experiment subcommands in display order (`list-checks` is not one of them).
[[nodiscard]] const std::vector<std::string>& subcommands();

struct CheckInfo {
    std::string subcommand;
    std::string name;
    std::string description;
    std::string anchor;
};

/// Every check any subcommand can emit.
[[nodiscard]] const std::vector<CheckInfo>& check_catalogue();
[[nodiscard]] std::string list_checks_text();

/// Fixture bundles compiled into the binary, addressed as `builtin:<name>`.
[[nodiscard]] std::optional<std::string_view> embedded_fixture(std::string_view name);

/// A validated configuration:
///
///     [run]         subcommand, output, seed
///     [tolerances]  overrides of nlx::Tolerances fields by name
///     [<subcommand>] the experiment block (at most one)
struct ExperimentConfig {
    std::string subcommand;
    io::IniDocument document;
    Tolerances tolerances;
    std::filesystem::path output = "nlx_out";
    std::uint64_t seed = 20240611;
    std::filesystem::path base_dir = ".";  // relative paths in the block resolve here
};

/// Throws InvalidInput on any schema violation. `subcommand` (from the command
/// line) must agree with `[run] subcommand` when both are given.
[[nodiscard]] ExperimentConfig make_config(io::IniDocument doc, std::optional<std::string> subcommand,
                                           std::filesystem::path base_dir = ".");
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path,
                                           std::optional<std::string> subcommand);

struct RunResult {
    std::vector<io::CheckResult> checks;
    std::vector<std::filesystem::path> files;  // written, in order
    [[nodiscard]] int exit_code() const { return io::all_pass(checks) ? 0 : 1; }
};

/// Nonnegative decimal integer; throws InvalidInput otherwise.
[[nodiscard]] std::uint64_t parse_seed(const std::string& text);

/// Runs the experiment and writes its files under `config.output`. Throws
/// InvalidInput (exit 2) or NumericRefusal (exit 3).
[[nodiscard]] RunResult run(const ExperimentConfig& config);

/// Exit-code contract of the command-line tool.
enum ExitCode : int { exit_pass = 0, exit_check_failed = 1, exit_invalid_input = 2, exit_numeric_refusal = 3 };

}  // namespace nlx::cli
