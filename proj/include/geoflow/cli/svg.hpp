#pragma once

#include "geoflow/curve.hpp"

#include <span>
#include <string>
#include <vector>

namespace geoflow::cli {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

/// Standalone SVG document with one polyline per series, axes with ticks and a legend.
std::string line_plot(const PlotSpec& spec);

/// Grid of panels, one per curve, each drawn in a fixed oblique view of R^3.
std::string curve_gallery(std::span<const DiscreteLoop> curves, std::span<const std::string> labels,
                          const std::string& title);

}  // namespace geoflow::cli
