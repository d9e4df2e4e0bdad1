#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

namespace geoflow::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2 };

struct CommandOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::size_t> resolution;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

/// Runs one of flow, tighten, width, audit, validate. Everything that can be checked before
/// computing is checked first; on a config error nothing is written.
int run_command(std::string_view command, const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace geoflow::cli
