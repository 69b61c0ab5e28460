#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "cli/config.hpp"

namespace mimo::cli {

/// Command-line flags; each set value replaces the config file's.
struct Overrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    bool plots = false;
};

/// Thread count when --jobs is absent.
std::size_t default_jobs();

void apply(const Overrides& overrides, RunConfig& config);

/// Writes to a sibling temp file, then renames over path.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Each command reads a resolved config and writes into config.out_dir.
/// ConfigError signals bad input; other exceptions are runtime failures.
void cmd_sweep(const RunConfig& config, std::size_t jobs, std::ostream& log);
void cmd_close_targets(const RunConfig& config, std::ostream& log);
void cmd_single(const RunConfig& config, std::ostream& out);
void cmd_calibrate(const RunConfig& config, std::size_t jobs, std::ostream& log);

/// Loads the config, applies overrides, dispatches, and maps failures to exit codes 2 and 3.
int run_command(const std::string& command, const std::string& config_path, const Overrides& overrides,
                std::ostream& out, std::ostream& err);

}  // namespace mimo::cli
