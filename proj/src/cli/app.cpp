#include "nlx/cli/app.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <utility>

#include "context.hpp"
#include "nlx/core/errors.hpp"
#include "nlx_fixtures.hpp"

namespace nlx::cli {

namespace {

using Runner = void (*)(Context&);

const std::vector<std::pair<std::string, Runner>>& runners() {
    static const std::vector<std::pair<std::string, Runner>> table = {
        {"duality-check", run_duality_check},
        {"tower-check", run_tower_check},
        {"heat", run_heat},
        {"generator-check", run_generator_check},
        {"levy-invariants", run_levy_invariants},
        {"compare", run_compare},
        {"control", run_control},
        {"dpp-check", run_dpp_check},
        {"cross-validate", run_cross_validate},
        {"laplace", run_laplace},
    };
    return table;
}

bool is_subcommand(const std::string& name) {
    const auto& s = subcommands();
    return std::find(s.begin(), s.end(), name) != s.end();
}

void apply_overrides(const io::IniSection* section, Tolerances& tol) {
    if (!section) return;
    io::SectionReader r(section, "tolerances");
    const std::map<std::string, double Tolerances::*> reals = {
        {"measure_sum", &Tolerances::measure_sum},
        {"exact", &Tolerances::exact},
        {"hull", &Tolerances::hull},
        {"roundtrip", &Tolerances::roundtrip},
        {"marginal", &Tolerances::marginal},
        {"subgradient_box", &Tolerances::subgradient_box},
        {"saturation_fraction", &Tolerances::saturation_fraction},
        {"primal_epsilon_floor", &Tolerances::primal_epsilon_floor},
        {"augmented_state_limit", &Tolerances::augmented_state_limit},
    };
    const std::map<std::string, int Tolerances::*> counts = {
        {"subgradient_iterations", &Tolerances::subgradient_iterations},
        {"lambda_samples", &Tolerances::lambda_samples},
        {"a_grid_points", &Tolerances::a_grid_points},
        {"max_monitoring_dates", &Tolerances::max_monitoring_dates},
    };
    for (const auto& [key, field] : reals)
        if (r.has(key)) tol.*field = r.get_positive(key, tol.*field);
    for (const auto& [key, field] : counts)
        if (r.has(key)) {
            const int v = r.get_int(key, tol.*field);
            if (v <= 0) throw InvalidInput("[tolerances] " + key + " must be positive");
            tol.*field = v;
        }
    r.finish();
}

}  // namespace

std::uint64_t parse_seed(const std::string& text) {
    const std::string t = io::trim(text);
    if (t.empty() || !std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw InvalidInput("seed must be a nonnegative integer");
    try {
        return std::stoull(t);
    } catch (const std::exception&) {
        throw InvalidInput("seed out of range");
    }
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, fn] : runners()) out.push_back(name);
        return out;
    }();
    return names;
}

std::optional<std::string_view> embedded_fixture(std::string_view name) {
    if (name == "binary2") return std::string_view(fixtures::binary2);
    if (name == "nonstable") return std::string_view(fixtures::nonstable);
    return std::nullopt;
}

ExperimentConfig make_config(io::IniDocument doc, std::optional<std::string> subcommand,
                             std::filesystem::path base_dir) {
    ExperimentConfig cfg;
    cfg.base_dir = std::move(base_dir);

    std::vector<std::string> blocks;
    for (const auto& s : doc.sections()) {
        if (s.name == "run" || s.name == "tolerances") continue;
        if (!is_subcommand(s.name))
            throw InvalidInput(doc.origin() + ": unknown section [" + s.name + "] at line " + std::to_string(s.line));
        blocks.push_back(s.name);
    }
    if (blocks.size() > 1)
        throw InvalidInput(doc.origin() + ": exactly one subcommand block allowed, found [" + blocks[0] + "] and [" +
                           blocks[1] + "]");

    io::SectionReader run(doc.find("run"), "run");
    std::string chosen = run.get("subcommand", "");
    if (subcommand) {
        if (!chosen.empty() && chosen != *subcommand)
            throw InvalidInput("[run] subcommand '" + chosen + "' conflicts with '" + *subcommand + "'");
        chosen = *subcommand;
    }
    if (chosen.empty()) {
        if (blocks.empty()) throw InvalidInput("no subcommand given");
        chosen = blocks.front();
    }
    if (!is_subcommand(chosen)) throw InvalidInput("unknown subcommand '" + chosen + "'");
    if (!blocks.empty() && blocks.front() != chosen)
        throw InvalidInput(doc.origin() + ": block [" + blocks.front() + "] does not match subcommand '" + chosen + "'");
    cfg.subcommand = chosen;

    cfg.output = run.get("output", cfg.output.string());
    if (run.has("seed")) cfg.seed = parse_seed(run.get("seed", ""));
    run.finish();
    if (cfg.output.is_relative() && doc.find("run") && doc.find("run")->entries.count("output"))
        cfg.output = cfg.base_dir / cfg.output;
    if (const char* env = std::getenv("NLX_OUT"); env && *env) cfg.output = env;

    apply_overrides(doc.find("tolerances"), cfg.tolerances);
    cfg.document = std::move(doc);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::string> subcommand) {
    auto doc = io::IniDocument::load(path);
    auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return make_config(std::move(doc), std::move(subcommand), base);
}

RunResult run(const ExperimentConfig& config) {
    const auto& table = runners();
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == config.subcommand; });
    if (it == table.end()) throw InvalidInput("unknown subcommand '" + config.subcommand + "'");
    Context ctx(config);
    it->second(ctx);
    ctx.block().finish();
    return ctx.finish();
}

// Context

Context::Context(const ExperimentConfig& config)
    : config_(config), block_(config.document.find(config.subcommand), config.subcommand) {}

void Context::at_most(const std::string& name, double value, double limit) {
    record(name, value, limit, value <= limit);
}

void Context::above(const std::string& name, double value, double limit) {
    record(name, value, limit, value > limit);
}

void Context::record(const std::string& name, double value, double tolerance, bool pass) {
    result_.checks.push_back({name, value, tolerance, pass});
}

void Context::write(const std::string& file, const std::string& text) {
    const auto path = config_.output / file;
    io::write_text(path, text);
    result_.files.push_back(path);
}

io::Bundle Context::bundle(const std::string& key, const std::string& fallback) {
    const std::string ref = block_.get(key, fallback);
    const std::string prefix = "builtin:";
    if (ref.rfind(prefix, 0) == 0) {
        const auto text = embedded_fixture(ref.substr(prefix.size()));
        if (!text) throw InvalidInput("unknown builtin fixture '" + ref + "'");
        return io::parse_bundle(io::IniDocument::parse(*text, ref));
    }
    std::filesystem::path path(ref);
    if (path.is_relative()) path = config_.base_dir / path;
    return io::load_bundle(path);
}

hjb::SpatialGrid Context::line_grid(const std::string& prefix, double lower, double upper, double dx) {
    const double lo = block_.get_double(prefix + "lower", lower);
    const double hi = block_.get_double(prefix + "upper", upper);
    const double step = block_.get_positive(prefix + "dx", dx);
    const auto rule = hjb::parse_boundary(block_.get(prefix + "boundary", "neumann"));
    return hjb::SpatialGrid::line(lo, hi, step, rule);
}

hjb::HamiltonianSpec Context::g_heat_band(const std::string& prefix, double a_lo, double a_hi) {
    const double lo = block_.get_positive(prefix + "a_lo", a_lo);
    const double hi = block_.get_positive(prefix + "a_hi", a_hi);
    const int n = block_.get_int(prefix + "samples", tol().lambda_samples);
    if (!(lo <= hi)) throw InvalidInput("[" + config_.subcommand + "] " + prefix + "a_lo must not exceed a_hi");
    return hjb::g_heat(lo, hi, n);
}

RunResult Context::finish() {
    write("summary.txt", io::summary_text(result_.checks));
    return std::move(result_);
}

}  // namespace nlx::cli
