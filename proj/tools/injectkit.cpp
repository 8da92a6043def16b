// Command-line front end: inject, analyze, list-attacks.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "injectkit/error.hpp"
#include "injectkit/pipeline.hpp"

using namespace injectkit;

namespace {

constexpr int kExitUsage = 2;

// Library errors exit with 10 + their position in Errc; see README.
int exit_code(Errc code) { return code == Errc::Usage ? kExitUsage : 10 + static_cast<int>(code); }

std::filesystem::path default_cache_dir() {
    if (const char* env = std::getenv("INJECTKIT_CACHE_DIR"); env && *env) return env;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return std::filesystem::path(xdg) / "injectkit";
    if (const char* home = std::getenv("HOME"); home && *home) return std::filesystem::path(home) / ".cache" / "injectkit";
    return {};
}

struct CommonFlags {
    std::string input;
    std::string output;
    std::string cache_dir;
    bool no_cache = false;
    std::size_t windows = 0;
    double window_seconds = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("-i,--input", f.input, "input PCAP")->required();
    cmd->add_option("--cache-dir", f.cache_dir, "statistics cache directory (env INJECTKIT_CACHE_DIR)");
    cmd->add_flag("--no-cache", f.no_cache, "always recompute statistics");
    auto* w = cmd->add_option("--windows", f.windows, "number of equal time windows (default 100)")
                  ->check(CLI::PositiveNumber);
    auto* ws = cmd->add_option("--window-seconds", f.window_seconds, "window length in seconds")
                   ->check(CLI::PositiveNumber);
    w->excludes(ws);
}

RunConfig to_config(const CommonFlags& f) {
    RunConfig c;
    c.input_path = f.input;
    c.output_path = f.output;
    c.cache_dir = f.cache_dir.empty() ? default_cache_dir() : std::filesystem::path(f.cache_dir);
    c.no_cache = f.no_cache;
    if (f.windows > 0) c.windows = WindowSpec::count(f.windows);
    if (f.window_seconds > 0) c.windows = WindowSpec::seconds(f.window_seconds);
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inject labeled synthetic attacks into PCAP traffic and audit captures for dataset defects"};
    app.require_subcommand(1);

    CommonFlags inject_flags;
    std::vector<std::vector<std::string>> attack_args;
    std::uint64_t seed = 0;
    bool tided = false;
    auto* inject = app.add_subcommand("inject", "merge generated attacks into a background capture");
    add_common(inject, inject_flags);
    inject->add_option("-o,--output", inject_flags.output, "output PCAP")->required();
    inject->add_option("-a,--attack", attack_args, "NAME key=value... (repeatable)")->allow_extra_args();
    inject->add_option("--seed", seed, "seed for every random choice (default 0)");
    inject->add_flag("--tided", tided, "also write a TIDED report for the output");

    CommonFlags analyze_flags;
    auto* analyze = app.add_subcommand("analyze", "write a TIDED report for a capture");
    add_common(analyze, analyze_flags);
    analyze->add_option("-o,--output", analyze_flags.output, "report directory (default <input>.tided)");

    auto* list = app.add_subcommand("list-attacks", "show attacks and their parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (list->parsed()) {
            std::cout << list_attacks_text();
        } else if (inject->parsed()) {
            RunConfig c = to_config(inject_flags);
            c.seed = seed;
            c.tided_enabled = tided;
            for (const auto& group : attack_args) {
                if (group.empty()) throw Error(Errc::Usage, "-a needs an attack name");
                c.attack_specs.push_back({group.front(), parse_user_params(std::span(group).subspan(1))});
            }
            run_inject(c, std::cout);
        } else if (analyze->parsed()) {
            run_analyze(to_config(analyze_flags));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << errc_name(e.code()) << ": " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: Internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
