#pragma once

// JSON and CSV forms of loops, sweepouts, flow reports, audits and width reports.
// Every JSON document carries "version": "<major>.<minor>"; readers reject other majors.

#include "geoflow/curve.hpp"
#include "geoflow/flow.hpp"
#include "geoflow/geodesic_audit.hpp"
#include "geoflow/sweepout.hpp"

#include <json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geoflow::io {

using Json = nlohmann::json;

inline constexpr int kFormatMajor = 1;
inline constexpr int kFormatMinor = 0;

/// Throws Format unless j["version"] is a string with major version kFormatMajor.
void check_version(const Json& j, std::string_view what);

Json to_json(const DiscreteLoop& loop);
DiscreteLoop loop_from_json(const Json& j);

Json to_json(const Sweepout& sw);
Sweepout sweepout_from_json(const Json& j);

Json to_json(const FlowParams& p);
FlowParams flow_params_from_json(const Json& j);

Json to_json(const FlowTrace& trace);
FlowTrace trace_from_json(const Json& j);

Json to_json(const FlowReport& report);
FlowReport flow_report_from_json(const Json& j);

Json to_json(const GeodesicAudit& audit);
GeodesicAudit audit_from_json(const Json& j);

Json audits_to_json(std::span<const GeodesicAudit> audits);
std::vector<GeodesicAudit> audits_from_json(const Json& j);

Json to_json(const WidthReport& report);
WidthReport width_report_from_json(const Json& j);

/// Header t,energy,sup_grad_sq,sup_vel_sq,dissipation,utt_l2
std::string trace_to_csv(const FlowTrace& trace);

/// Header s,energy,residual_sup,residual_l2,match_id,c1_dist
std::string audits_to_csv(std::span<const GeodesicAudit> audits);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

std::string dump(const Json& j);

std::string read_file(const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

/// Writes to a temporary file next to `path`, then renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace geoflow::io
