#pragma once

// CSV and hand-written SVG output.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gnnwm/error.hpp"

namespace gnnwm {

/// Fixed-point decimal text, locale independent.
inline std::string fixed(double v, int digits = 6) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    return std::string(buf, r.ptr);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::string xml_escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '&': o += "&amp;"; break;
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

struct Series {
    std::string name;
    std::vector<double> x, y;
};

struct GuideLine {
    bool vertical = false;
    double at = 0.0;
    std::string label;
};

/// Line chart: one polyline per series, optional guide lines, axes with
/// min/max tick labels.
inline std::string svg_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                             const std::vector<Series>& series, const std::vector<GuideLine>& guides = {}) {
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    for (const auto& g : guides) {
        if (g.vertical) {
            x0 = std::min(x0, g.at);
            x1 = std::max(x1, g.at);
        } else {
            y0 = std::min(y0, g.at);
            y1 = std::max(y1, g.at);
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1;
    if (!std::isfinite(y0)) y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double px = (x1 - x0) * 0.05, py = (y1 - y0) * 0.05;
    x0 -= px, x1 += px, y0 -= py, y1 += py;
    auto sx = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
    auto sy = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title)
      << "</text>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
      << xml_escape(xlabel) << "</text>\n";
    o << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << (T + H - B) / 2 << ")\">" << xml_escape(ylabel) << "</text>\n";
    o << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"10\">" << fixed(x0, 4) << "</text>\n";
    o << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\" font-size=\"10\">" << fixed(x1, 4)
      << "</text>\n";
    o << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" text-anchor=\"end\" font-size=\"10\">" << fixed(y0, 4)
      << "</text>\n";
    o << "<text x=\"" << L - 4 << "\" y=\"" << T + 10 << "\" text-anchor=\"end\" font-size=\"10\">" << fixed(y1, 4)
      << "</text>\n";
    for (const auto& g : guides) {
        if (g.vertical)
            o << "<line x1=\"" << fixed(sx(g.at), 2) << "\" y1=\"" << T << "\" x2=\"" << fixed(sx(g.at), 2) << "\" y2=\""
              << H - B << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
        else
            o << "<line x1=\"" << L << "\" y1=\"" << fixed(sy(g.at), 2) << "\" x2=\"" << W - R << "\" y2=\""
              << fixed(sy(g.at), 2) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
        o << "<text x=\"" << fixed(g.vertical ? sx(g.at) + 3 : W - R - 2, 2) << "\" y=\""
          << fixed(g.vertical ? T + 12 : sy(g.at) - 3, 2) << "\" font-size=\"10\" fill=\"gray\""
          << (g.vertical ? "" : " text-anchor=\"end\"") << ">" << xml_escape(g.label) << "</text>\n";
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kColors[k % (sizeof kColors / sizeof *kColors)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!first) o << ' ';
            o << fixed(sx(s.x[i]), 2) << ',' << fixed(sy(s.y[i]), 2);
            first = false;
        }
        o << "\"><title>" << xml_escape(s.name) << "</title></polyline>\n";
        o << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (k + 1) << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
          << color << "\">" << xml_escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

/// Histogram of values in [lo, hi] drawn as a step outline (a single series).
inline std::string svg_histogram(const std::string& title, const std::string& xlabel, const std::vector<double>& values,
                                 double lo, double hi, int bins) {
    if (bins < 1 || !(hi > lo)) throw InvalidArgument("bad histogram range");
    std::vector<double> count(static_cast<std::size_t>(bins), 0.0);
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        auto b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
        b = std::clamp(b, 0, bins - 1);
        count[static_cast<std::size_t>(b)] += 1.0;
    }
    Series s{"count", {}, {}};
    const double w = (hi - lo) / bins;
    s.x.push_back(lo);
    s.y.push_back(0.0);
    for (int b = 0; b < bins; ++b) {
        s.x.push_back(lo + b * w);
        s.y.push_back(count[static_cast<std::size_t>(b)]);
        s.x.push_back(lo + (b + 1) * w);
        s.y.push_back(count[static_cast<std::size_t>(b)]);
    }
    s.x.push_back(hi);
    s.y.push_back(0.0);
    return svg_chart(title, xlabel, "count", {s});
}

}  // namespace gnnwm
