#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "injectkit/framework.hpp"
#include "injectkit/windows.hpp"

namespace injectkit {

struct AttackSpec {
    std::string name;
    UserParams params;
};

struct RunConfig {
    std::filesystem::path input_path;
    std::filesystem::path output_path;  // for analyze: the report directory
    std::filesystem::path cache_dir;
    std::uint64_t seed = 0;
    WindowSpec windows = WindowSpec::defaults();
    std::vector<AttackSpec> attack_specs;
    bool tided_enabled = false;
    bool no_cache = false;
};

std::filesystem::path labels_path_for(const std::filesystem::path& output);
std::filesystem::path tided_dir_for(const std::filesystem::path& output);

/// Writes the output capture, its labels and (optionally) the TIDED report.
/// The run manifest goes to `manifest`. Nothing but the stats cache is left
/// behind when it throws.
void run_inject(const RunConfig& config, std::ostream& manifest);

/// Writes the TIDED report for the input capture.
void run_analyze(const RunConfig& config);

std::string list_attacks_text();

} // namespace injectkit
