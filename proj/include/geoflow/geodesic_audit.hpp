#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geoflow {

enum class Classification { ConvergedToGeodesic, CollapsedToPoint, Undetermined };

std::string_view to_string(Classification c);
std::optional<Classification> parse_classification(std::string_view s);

/// Closeness of one near-maximal sweepout slice to the catalogued geodesics.
struct GeodesicAudit {
    std::size_t slice_index = 0;
    double s = 0.0;
    double energy = 0.0;
    double residual_sup = 0.0;
    double residual_l2 = 0.0;
    std::string match_id;
    std::vector<double> match_params;
    double c1_distance = 0.0;
    std::optional<Classification> classification;

    friend bool operator==(const GeodesicAudit&, const GeodesicAudit&) = default;
};

}  // namespace geoflow
