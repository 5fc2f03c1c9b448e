#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nlx/cli/app.hpp"
#include "nlx/core/errors.hpp"
#include "nlx/io/ini.hpp"

namespace {

std::string usage_footer() {
    std::string s = "Subcommands:";
    for (const auto& name : nlx::cli::subcommands()) s += " " + name;
    return s + " list-checks\nExit codes: 0 pass, 1 check failed, 2 invalid input, 3 numeric refusal.";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear expectation experiments"};
    app.footer(usage_footer());
    std::string subcommand;
    std::string config;
    std::string out;
    std::string seed;
    bool list = false;
    app.add_option("subcommand", subcommand, "experiment to run");
    app.add_option("-c,--config", config, "INI configuration file");
    app.add_option("-o,--out", out, "output directory (overrides NLX_OUT and [run] output)");
    app.add_option("-s,--seed", seed, "seed for the randomized suites");
    app.add_flag("--list-checks", list, "print every acceptance check and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return nlx::cli::exit_invalid_input;
    }

    if (list || subcommand == "list-checks") {
        std::cout << nlx::cli::list_checks_text();
        return nlx::cli::exit_pass;
    }

    try {
        std::optional<std::string> chosen;
        if (!subcommand.empty()) chosen = subcommand;
        auto cfg = config.empty() ? nlx::cli::make_config(nlx::io::IniDocument{}, chosen)
                                  : nlx::cli::load_config(config, chosen);
        if (!out.empty()) cfg.output = out;
        if (!seed.empty()) cfg.seed = nlx::cli::parse_seed(seed);
        const auto start = std::chrono::steady_clock::now();
        const auto result = nlx::cli::run(cfg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << nlx::io::summary_text(result.checks);
        std::fprintf(stderr, "%s: %zu checks, %zu files in %s, %.2f s\n", cfg.subcommand.c_str(),
                     result.checks.size(), result.files.size(), cfg.output.string().c_str(), secs);
        return result.exit_code();
    } catch (const nlx::NumericRefusal& e) {
        std::cerr << "numeric refusal: " << e.what();
        if (e.suggestion() > 0.0) std::cerr << " (try " << e.suggestion() << ")";
        std::cerr << "\n";
        return nlx::cli::exit_numeric_refusal;
    } catch (const nlx::InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return nlx::cli::exit_invalid_input;
    }
}
