#pragma once

// Minimal self-contained SVG line/scatter charts (inline styles only).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace stochcap {

enum class SeriesKind { Points, Line };

struct PlotSeries {
    std::string name;
    std::string color;
    SeriesKind kind = SeriesKind::Points;
    std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    int width = 800;
    int height = 500;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
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

// Tick step of 1, 2 or 5 times a power of ten giving about `target` ticks.
inline double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

inline std::string fmt_num(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

}  // namespace detail

inline void write_svg(std::ostream& out, const PlotSpec& spec) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : spec.series)
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            xmin = std::min(xmin, x), xmax = std::max(xmax, x);
            ymin = std::min(ymin, y), ymax = std::max(ymax, y);
        }
    if (!std::isfinite(xmin)) throw DomainError("nothing to plot");
    if (xmax == xmin) xmin -= 1.0, xmax += 1.0;
    if (ymax == ymin) ymin -= 1.0, ymax += 1.0;
    const double xstep = detail::nice_step(xmax - xmin, 8), ystep = detail::nice_step(ymax - ymin, 6);
    xmin = std::floor(xmin / xstep) * xstep, xmax = std::ceil(xmax / xstep) * xstep;
    ymin = std::floor(ymin / ystep) * ystep, ymax = std::ceil(ymax / ystep) * ystep;

    const double left = 80, right = 170, top = 40, bottom = 60;
    const double pw = spec.width - left - right, ph = spec.height - top - bottom;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };
    const std::string font = "font-family:Arial,Helvetica,sans-serif;";

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
        << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height
        << "\" style=\"fill:#ffffff\"/>\n"
        << "<text x=\"" << spec.width / 2 << "\" y=\"24\" style=\"" << font
        << "font-size:15px;font-weight:bold;text-anchor:middle\">" << detail::xml_escape(spec.title) << "</text>\n";

    for (double x = xmin; x <= xmax + 0.5 * xstep; x += xstep) {
        out << "<line x1=\"" << px(x) << "\" y1=\"" << top << "\" x2=\"" << px(x) << "\" y2=\"" << top + ph
            << "\" style=\"stroke:#dddddd;stroke-width:1\"/>\n"
            << "<text x=\"" << px(x) << "\" y=\"" << top + ph + 18 << "\" style=\"" << font
            << "font-size:11px;text-anchor:middle\">" << detail::fmt_num(x) << "</text>\n";
    }
    for (double y = ymin; y <= ymax + 0.5 * ystep; y += ystep) {
        out << "<line x1=\"" << left << "\" y1=\"" << py(y) << "\" x2=\"" << left + pw << "\" y2=\"" << py(y)
            << "\" style=\"stroke:#dddddd;stroke-width:1\"/>\n"
            << "<text x=\"" << left - 8 << "\" y=\"" << py(y) + 4 << "\" style=\"" << font
            << "font-size:11px;text-anchor:end\">" << detail::fmt_num(y) << "</text>\n";
    }
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" style=\"fill:none;stroke:#000000;stroke-width:1\"/>\n"
        << "<text x=\"" << left + pw / 2 << "\" y=\"" << spec.height - 15 << "\" style=\"" << font
        << "font-size:13px;text-anchor:middle\">" << detail::xml_escape(spec.x_label) << "</text>\n"
        << "<text x=\"20\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 20 " << top + ph / 2 << ")\" style=\""
        << font << "font-size:13px;text-anchor:middle\">" << detail::xml_escape(spec.y_label) << "</text>\n";

    for (const auto& s : spec.series) {
        if (s.kind == SeriesKind::Line) {
            out << "<polyline style=\"fill:none;stroke:" << s.color << ";stroke-width:2\" points=\"";
            for (const auto& [x, y] : s.points)
                if (std::isfinite(x) && std::isfinite(y)) out << px(x) << ',' << py(y) << ' ';
            out << "\"/>\n";
        } else {
            for (const auto& [x, y] : s.points)
                if (std::isfinite(x) && std::isfinite(y))
                    out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" style=\"fill:" << s.color
                        << ";fill-opacity:0.6;stroke:none\"/>\n";
        }
    }

    double ly = top + 10;
    for (const auto& s : spec.series) {
        const double lx = left + pw + 15;
        if (s.kind == SeriesKind::Line)
            out << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 20 << "\" y2=\"" << ly
                << "\" style=\"stroke:" << s.color << ";stroke-width:2\"/>\n";
        else
            out << "<circle cx=\"" << lx + 10 << "\" cy=\"" << ly << "\" r=\"4\" style=\"fill:" << s.color << "\"/>\n";
        out << "<text x=\"" << lx + 26 << "\" y=\"" << ly + 4 << "\" style=\"" << font << "font-size:11px\">"
            << detail::xml_escape(s.name) << "</text>\n";
        ly += 18;
    }
    out << "</svg>\n";
}

}  // namespace stochcap
