#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlx/cli/app.hpp"
#include "nlx/hjb/grid.hpp"
#include "nlx/hjb/hamiltonian.hpp"
#include "nlx/io/bundle.hpp"
#include "nlx/io/ini.hpp"
#include "nlx/io/report.hpp"

namespace nlx::cli {

// Shared state of one experiment run: the subcommand block, the checks
// recorded so far and the files written.
class Context {
public:
    explicit Context(const ExperimentConfig& config);

    [[nodiscard]] const ExperimentConfig& config() const noexcept { return config_; }
    [[nodiscard]] const Tolerances& tol() const noexcept { return config_.tolerances; }
    [[nodiscard]] io::SectionReader& block() noexcept { return block_; }

    // pass iff value <= limit (NaN fails)
    void at_most(const std::string& name, double value, double limit);
    // pass iff value > limit
    void above(const std::string& name, double value, double limit);
    void record(const std::string& name, double value, double tolerance, bool pass);

    void write(const std::string& file, const std::string& text);

    // `builtin:<name>` or a path relative to the config file.
    [[nodiscard]] io::Bundle bundle(const std::string& key, const std::string& fallback);
    // lower, upper, dx, boundary keys with the given defaults.
    [[nodiscard]] hjb::SpatialGrid line_grid(const std::string& prefix, double lower, double upper, double dx);
    // a_lo, a_hi, samples keys.
    [[nodiscard]] hjb::HamiltonianSpec g_heat_band(const std::string& prefix, double a_lo, double a_hi);

    [[nodiscard]] RunResult finish();

private:
    const ExperimentConfig& config_;
    io::SectionReader block_;
    RunResult result_;
};

void run_duality_check(Context& ctx);
void run_tower_check(Context& ctx);
void run_heat(Context& ctx);
void run_generator_check(Context& ctx);
void run_levy_invariants(Context& ctx);
void run_compare(Context& ctx);
void run_control(Context& ctx);
void run_dpp_check(Context& ctx);
void run_cross_validate(Context& ctx);
void run_laplace(Context& ctx);

}  // namespace nlx::cli
