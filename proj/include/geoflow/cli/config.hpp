#pragma once

#include "geoflow/flow.hpp"
#include "geoflow/vec3.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace geoflow::cli {

struct CurvePreset {
    enum class Kind { Point, GreatCircle, Latitude, Perturbed };
    Kind kind = Kind::GreatCircle;
    Vec3 point{0.0, 0.0, 1.0};
    Vec3 axis{0.0, 0.0, 1.0};
    double phi = 0.7853981633974483;
    /// Falls back to the top-level seed.
    std::optional<std::uint64_t> seed;
    double amplitude = 0.2;
};

struct SweepoutPreset {
    std::size_t n_slices = 65;
    int axis = 2;
};

/// Loop, sweepout or checkpoint file; the kind is detected from its contents.
struct InputFile {
    std::filesystem::path path;
};

struct AuditSettings {
    double delta = 0.05;
    double epsilon = 0.05;
    double gap_bound = 0.5;
};

struct RunConfig {
    std::string manifold_kind = "sphere";
    std::vector<double> manifold_params;
    std::variant<CurvePreset, SweepoutPreset, InputFile> initial = CurvePreset{};
    FlowParams flow;
    std::vector<double> schedule;
    AuditSettings audit;
    std::filesystem::path output_dir = "geoflow_out";
    std::size_t resolution = 256;
    std::uint64_t seed = 0;
};

/// Validates a config document. Relative file paths are resolved against base_dir.
/// Throws Config with one line per violation, each naming the offending key path.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Reads and validates a config file; a missing or unparsable file is a Config error.
RunConfig parse_config(const std::filesystem::path& path);

}  // namespace geoflow::cli
