// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "../support/properties.hpp"
#include "nlx/cli/app.hpp"
#include "nlx/core/errors.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    std::vector<nlx::io::CheckResult> checks;
    double seconds = 0.0;
    std::string error;
};

Outcome run_subcommand(const std::string& name) {
    Outcome out;
    const auto start = Clock::now();
    try {
        auto cfg = nlx::cli::make_config(nlx::io::IniDocument{}, name);
        cfg.output = fs::temp_directory_path() / "nlx_acceptance" / name;
        out.checks = nlx::cli::run(cfg).checks;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
}

struct Criterion {
    int id;
    std::string title;
    std::vector<std::string> subcommands;
    std::vector<std::string> prefixes;  // check-name prefixes that belong to the criterion
    double budget;                      // seconds; 0 for none
};

bool matches(const std::string& name, const std::vector<std::string>& prefixes) {
    for (const auto& p : prefixes)
        if (name.rfind(p, 0) == 0) return true;
    return false;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "duality roundtrip", {"duality-check"}, {"duality."}, 5.0},
        {2, "tower and stability", {"tower-check"}, {"tower.stable_families", "tower.stability_random",
                                                     "tower.nonstable_fixture", "tower.bundle_stable"}, 5.0},
        {3, "finite-dimensional uniqueness", {"duality-check"}, {"marginal."}, 10.0},
        {4, "G-heat closed forms", {"heat"}, {"heat.convex_value", "heat.concave_value", "heat.refinement_ratio"}, 60.0},
        {5, "semigroup property", {"heat"}, {"heat.semigroup_residual"}, 0.0},
        {6, "generator consistency", {"generator-check"}, {"generator.g_heat"}, 0.0},
        {7, "Levy invariants", {"levy-invariants"}, {"levy."}, 0.0},
        {8, "relaxed control", {"control", "dpp-check", "cross-validate"}, {"control.", "dpp.", "cross."}, 0.0},
        {9, "Laplace principle", {"laplace"}, {"laplace."}, 300.0},
    };

    std::map<std::string, Outcome> runs;
    bool all = true;
    for (const auto& c : criteria) {
        std::vector<nlx::io::CheckResult> mine;
        double seconds = 0.0;
        std::string error;
        for (const auto& s : c.subcommands) {
            if (!runs.count(s)) runs[s] = run_subcommand(s);
            const auto& o = runs[s];
            seconds += o.seconds;
            if (!o.error.empty()) error += s + ": " + o.error + "; ";
            for (const auto& r : o.checks)
                if (matches(r.name, c.prefixes)) mine.push_back(r);
        }
        bool pass = error.empty() && !mine.empty();
        std::string failed;
        for (const auto& r : mine)
            if (!r.pass) {
                pass = false;
                failed += " " + r.name + "=" + nlx::io::format_number(r.value);
            }
        const bool in_time = c.budget <= 0.0 || seconds < c.budget;
        pass = pass && in_time;
        all = all && pass;
        std::printf("CRITERION %d %s  %s  checks=%zu  runtime=%.2fs%s%s%s%s\n", c.id, pass ? "PASS" : "FAIL",
                    c.title.c_str(), mine.size(), seconds, c.budget > 0.0 ? " (budget " : "",
                    c.budget > 0.0 ? (nlx::io::format_number(c.budget) + "s)").c_str() : "",
                    failed.empty() ? "" : ("  failed:" + failed).c_str(), error.empty() ? "" : ("  error: " + error).c_str());
        std::fflush(stdout);
    }

    // Criterion 10: randomized axiom suites on both backends.
    const auto start = Clock::now();
    auto tallies = nlx::testing::lattice_properties(20240611, 500);
    const auto hjb = nlx::testing::hjb_properties(20240612, 500);
    tallies.insert(tallies.end(), hjb.begin(), hjb.end());
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    bool pass = true;
    std::string detail;
    for (const auto& t : tallies) {
        pass = pass && t.violations == 0 && t.cases == 500;
        detail += " " + t.backend + "/" + t.property + "=" + std::to_string(t.violations) + "/" + std::to_string(t.cases);
    }
    all = all && pass;
    std::printf("CRITERION 10 %s  property suites  runtime=%.2fs  violations:%s\n", pass ? "PASS" : "FAIL", seconds,
                detail.c_str());
    return all ? 0 : 1;
}
