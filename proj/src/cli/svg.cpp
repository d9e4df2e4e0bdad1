#include "geoflow/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace geoflow::cli {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string header(double w, double h) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(w) +
           "\" height=\"" + coord(h) + "\" viewBox=\"0 0 " + coord(w) + " " + coord(h) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle", const char* extra = "") {
    return "<text x=\"" + coord(x) + "\" y=\"" + coord(y) + "\" text-anchor=\"" + anchor + "\"" + extra + ">" +
           xml_escape(s) + "</text>\n";
}

// Round tick spacing covering [lo, hi] with about `target` intervals.
double tick_step(double lo, double hi, int target) {
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

}  // namespace

std::string line_plot(const PlotSpec& spec) {
    const double width = 720.0;
    const double height = 440.0;
    const double left = 80.0;
    const double right = 170.0;
    const double top = 40.0;
    const double bottom = 60.0;

    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin;
    double ymin = xmin;
    double ymax = -xmin;
    for (const auto& s : spec.series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax - xmin < 1e-300) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12 * std::max(1.0, std::abs(ymax))) {
        const double pad = std::max(1e-6, 0.05 * std::abs(ymax));
        ymin -= pad;
        ymax += pad;
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double pw = width - left - right;
    const double ph = height - top - bottom;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

    std::string out = header(width, height);
    out += text(width / 2.0, 24.0, spec.title, "middle", " font-size=\"15\"");
    out += "<rect x=\"" + coord(left) + "\" y=\"" + coord(top) + "\" width=\"" + coord(pw) + "\" height=\"" + coord(ph) +
           "\" fill=\"none\" stroke=\"black\"/>\n";

    const double xs = tick_step(xmin, xmax, 6);
    for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-9 * xs; t += xs) {
        const double x = px(t);
        out += "<line x1=\"" + coord(x) + "\" y1=\"" + coord(top + ph) + "\" x2=\"" + coord(x) + "\" y2=\"" +
               coord(top + ph + 5) + "\" stroke=\"black\"/>\n";
        out += text(x, top + ph + 19, fmt(std::abs(t) < 1e-12 * xs ? 0.0 : t));
    }
    const double ys = tick_step(ymin, ymax, 6);
    for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-9 * ys; t += ys) {
        const double y = py(t);
        out += "<line x1=\"" + coord(left - 5) + "\" y1=\"" + coord(y) + "\" x2=\"" + coord(left + pw) + "\" y2=\"" +
               coord(y) + "\" stroke=\"#dddddd\"/>\n";
        out += text(left - 8, y + 4, fmt(std::abs(t) < 1e-12 * ys ? 0.0 : t), "end");
    }
    out += text(left + pw / 2.0, height - 15, spec.x_label);
    out += "<text x=\"18\" y=\"" + coord(top + ph / 2.0) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           coord(top + ph / 2.0) + ")\">" + xml_escape(spec.y_label) + "</text>\n";

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        std::string pts;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            pts += coord(px(s.x[i])) + "," + coord(py(s.y[i])) + " ";
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts +
               "\"/>\n";
        const double ly = top + 14.0 + 18.0 * static_cast<double>(k);
        out += "<line x1=\"" + coord(width - right + 12) + "\" y1=\"" + coord(ly - 4) + "\" x2=\"" +
               coord(width - right + 36) + "\" y2=\"" + coord(ly - 4) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        out += text(width - right + 42, ly, s.label, "start");
    }
    out += "</svg>\n";
    return out;
}

std::string curve_gallery(std::span<const DiscreteLoop> curves, std::span<const std::string> labels,
                          const std::string& title) {
    const std::size_t count = curves.size();
    const std::size_t cols = std::max<std::size_t>(1, std::min<std::size_t>(4, count));
    const std::size_t rows = std::max<std::size_t>(1, (count + cols - 1) / cols);
    const double panel = 200.0;
    const double width = panel * static_cast<double>(cols);
    const double height = 40.0 + panel * static_cast<double>(rows);

    // Oblique view: azimuth 30 degrees, elevation 25 degrees.
    const double az = 0.5235987755982988;
    const double el = 0.4363323129985824;
    auto project = [&](const Vec3& p) {
        const double u = -std::sin(az) * p.x + std::cos(az) * p.y;
        const double v = -std::cos(az) * std::sin(el) * p.x - std::sin(az) * std::sin(el) * p.y + std::cos(el) * p.z;
        return std::pair{u, v};
    };

    double extent = 1e-9;
    for (const auto& c : curves) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            const auto [u, v] = project(c.point(i));
            extent = std::max({extent, std::abs(u), std::abs(v)});
        }
    }
    const double scale = 0.42 * panel / extent;

    std::string out = header(width, height);
    out += text(width / 2.0, 24.0, title, "middle", " font-size=\"15\"");
    for (std::size_t k = 0; k < count; ++k) {
        const double cx = panel * (static_cast<double>(k % cols) + 0.5);
        const double cy = 40.0 + panel * (static_cast<double>(k / cols) + 0.5);
        out += "<rect x=\"" + coord(cx - panel / 2 + 4) + "\" y=\"" + coord(cy - panel / 2 + 4) + "\" width=\"" +
               coord(panel - 8) + "\" height=\"" + coord(panel - 8) + "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
        std::string pts;
        const auto& c = curves[k];
        for (std::size_t i = 0; i < c.size(); ++i) {
            const auto [u, v] = project(c.point(i));
            pts += coord(cx + scale * u) + "," + coord(cy - scale * v) + " ";
        }
        out += "<polygon fill=\"none\" stroke=\"" + std::string(kPalette[k % std::size(kPalette)]) +
               "\" stroke-width=\"1.2\" points=\"" + pts + "\"/>\n";
        if (k < labels.size()) out += text(cx, cy + panel / 2 - 12, labels[k], "middle", " font-size=\"11\"");
    }
    out += "</svg>\n";
    return out;
}

}  // namespace geoflow::cli
