#pragma once

// Tiny dependency-free SVG plots. Enough to eyeball a sweep; not a plotting
// library. All functions are pure string builders.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "compkit/common.hpp"

namespace compkit::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return colors[i % 8];
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void update(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double m = 0.05 * (hi - lo);
        lo -= m;
        hi += m;
    }
    double frac(double v) const { return (v - lo) / (hi - lo); }
};

}  // namespace detail

// Line chart with markers. Axes are linear; labels are printed at the ends.
inline std::string line_chart(const std::vector<Series>& series, const std::string& title,
                              const std::string& xlabel, const std::string& ylabel) {
    const double W = 640, H = 440, L = 70, R = 20, T = 40, B = 50;
    detail::Range rx, ry;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw ConfigError("svg: series length mismatch");
        for (double v : s.x) rx.update(v);
        for (double v : s.y) ry.update(v);
    }
    rx.pad();
    ry.pad();
    auto px = [&](double v) { return L + rx.frac(v) * (W - L - R); };
    auto py = [&](double v) { return H - B - ry.frac(v) * (H - T - B); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"440\" "
           "viewBox=\"0 0 640 440\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
    out += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + title + "</text>\n";
    out += "<line x1=\"" + detail::num(L) + "\" y1=\"" + detail::num(H - B) + "\" x2=\"" +
           detail::num(W - R) + "\" y2=\"" + detail::num(H - B) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + detail::num(L) + "\" y1=\"" + detail::num(T) + "\" x2=\"" +
           detail::num(L) + "\" y2=\"" + detail::num(H - B) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"320\" y=\"" + detail::num(H - 12) + "\" text-anchor=\"middle\">" + xlabel +
           "</text>\n";
    out += "<text x=\"16\" y=\"220\" text-anchor=\"middle\" transform=\"rotate(-90 16 220)\">" +
           ylabel + "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
        const double fy = ry.lo + (ry.hi - ry.lo) * i / 4.0;
        out += "<text x=\"" + detail::num(px(fx)) + "\" y=\"" + detail::num(H - B + 16) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + detail::tick(fx) + "</text>\n";
        out += "<text x=\"" + detail::num(L - 6) + "\" y=\"" + detail::num(py(fy) + 4) +
               "\" text-anchor=\"end\" font-size=\"10\">" + detail::tick(fy) + "</text>\n";
    }
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = detail::palette(si);
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            pts += detail::num(px(s.x[i])) + "," + detail::num(py(s.y[i])) + " ";
            out += "<circle cx=\"" + detail::num(px(s.x[i])) + "\" cy=\"" +
                   detail::num(py(s.y[i])) + "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
        }
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.5\"/>\n";
        out += "<text x=\"" + detail::num(W - R - 4) + "\" y=\"" +
               detail::num(T + 16.0 * static_cast<double>(si + 1)) +
               "\" text-anchor=\"end\" fill=\"" + color + "\">" + s.label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

// Heatmap over a rectangular grid; values mapped blue (low) -> red (high).
inline std::string heatmap(const std::vector<double>& xs, const std::vector<double>& ys,
                           const std::vector<std::vector<double>>& values,  // [yi][xi]
                           const std::string& title, const std::string& xlabel,
                           const std::string& ylabel) {
    if (values.size() != ys.size()) throw ConfigError("svg: heatmap row count mismatch");
    for (const auto& row : values)
        if (row.size() != xs.size()) throw ConfigError("svg: heatmap column count mismatch");
    detail::Range rv;
    for (const auto& row : values)
        for (double v : row) rv.update(v);
    if (!(rv.lo <= rv.hi)) {
        rv.lo = 0.0;
        rv.hi = 1.0;
    }
    if (rv.hi - rv.lo < 1e-12) rv.hi = rv.lo + 1.0;

    const double W = 640, H = 480, L = 80, R = 90, T = 40, B = 60;
    const double cw = (W - L - R) / static_cast<double>(xs.size());
    const double ch = (H - T - B) / static_cast<double>(ys.size());
    auto color = [&](double v) {
        if (!std::isfinite(v)) return std::string("#cccccc");
        const double f = std::clamp((v - rv.lo) / (rv.hi - rv.lo), 0.0, 1.0);
        const int r = static_cast<int>(std::lround(255.0 * f));
        const int b = static_cast<int>(std::lround(255.0 * (1.0 - f)));
        const int g = static_cast<int>(std::lround(90.0 * (1.0 - std::fabs(2.0 * f - 1.0))));
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
        return std::string(buf);
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    out += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + title + "</text>\n";
    for (std::size_t yi = 0; yi < ys.size(); ++yi) {
        for (std::size_t xi = 0; xi < xs.size(); ++xi) {
            const double x0 = L + cw * static_cast<double>(xi);
            // row 0 at the bottom
            const double y0 = H - B - ch * static_cast<double>(yi + 1);
            out += "<rect x=\"" + detail::num(x0) + "\" y=\"" + detail::num(y0) + "\" width=\"" +
                   detail::num(cw) + "\" height=\"" + detail::num(ch) + "\" fill=\"" +
                   color(values[yi][xi]) + "\"/>\n";
        }
    }
    for (std::size_t xi = 0; xi < xs.size(); ++xi)
        out += "<text x=\"" + detail::num(L + cw * (static_cast<double>(xi) + 0.5)) + "\" y=\"" +
               detail::num(H - B + 16) + "\" text-anchor=\"middle\" font-size=\"9\">" +
               detail::tick(xs[xi]) + "</text>\n";
    for (std::size_t yi = 0; yi < ys.size(); ++yi)
        out += "<text x=\"" + detail::num(L - 6) + "\" y=\"" +
               detail::num(H - B - ch * (static_cast<double>(yi) + 0.5) + 4) +
               "\" text-anchor=\"end\" font-size=\"9\">" + detail::tick(ys[yi]) + "</text>\n";
    out += "<text x=\"320\" y=\"" + detail::num(H - 16) + "\" text-anchor=\"middle\">" + xlabel +
           "</text>\n";
    out += "<text x=\"18\" y=\"240\" text-anchor=\"middle\" transform=\"rotate(-90 18 240)\">" +
           ylabel + "</text>\n";
    out += "<text x=\"" + detail::num(W - R + 8) + "\" y=\"" + detail::num(T + 10) +
           "\" font-size=\"10\">" + detail::tick(rv.hi) + "</text>\n";
    out += "<text x=\"" + detail::num(W - R + 8) + "\" y=\"" + detail::num(H - B) +
           "\" font-size=\"10\">" + detail::tick(rv.lo) + "</text>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace compkit::svg
