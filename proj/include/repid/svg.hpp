#ifndef REPID_SVG_HPP
#define REPID_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "repid/common.hpp"

namespace repid {

// Minimal dependency-free SVG line charts. Output is deterministic for a
// fixed input: fixed-point coordinates, stable element order.

struct SvgSeries {
    std::string label;   // legend entry; empty = not in legend
    std::string cls;     // class attribute, e.g. "ice" or "rep region-3"
    std::string color = "#000000";
    double width = 1.0;
    double opacity = 1.0;
    std::vector<double> y;
};

struct SvgChart {
    int width = 640;
    int height = 420;
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<SvgSeries> series;
};

namespace detail {

inline std::string fp(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double mult : {1.0, 2.0, 5.0, 10.0})
        if (mag * mult >= raw) {
            step = mag * mult;
            break;
        }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * step; t += step)
        ticks.push_back(std::fabs(t) < 1e-12 * step ? 0.0 : t);
    return ticks;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace detail

inline const std::vector<std::string>& svg_palette() {
    static const std::vector<std::string> palette = {
        "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e",
        "#e6ab02", "#a6761d", "#666666", "#1f78b4", "#b2182b",
        "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#999999"};
    return palette;
}

inline std::string render_line_chart(const SvgChart& chart) {
    if (chart.x.empty() || chart.series.empty())
        throw_data("svg: nothing to plot");
    for (const auto& s : chart.series)
        if (s.y.size() != chart.x.size())
            throw_data("svg: series length does not match grid");

    const double ml = 56, mr = 16, mt = chart.title.empty() ? 16 : 34, mb = 44;
    const double pw = chart.width - ml - mr;
    const double ph = chart.height - mt - mb;

    double xmin = chart.x.front(), xmax = chart.x.back();
    double ymin = chart.series[0].y[0], ymax = ymin;
    for (const auto& s : chart.series)
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    const double ypad = 0.04 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double v) { return mt + ph - (v - ymin) / (ymax - ymin) * ph; };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(chart.width) + "\" height=\"" +
           std::to_string(chart.height) + "\" viewBox=\"0 0 " +
           std::to_string(chart.width) + " " + std::to_string(chart.height) +
           "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (!chart.title.empty())
        out += "<text x=\"" + detail::fp(ml + pw / 2) +
               "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"14\">" +
               detail::xml_escape(chart.title) + "</text>\n";

    // axes
    out += "<line x1=\"" + detail::fp(ml) + "\" y1=\"" + detail::fp(mt + ph) +
           "\" x2=\"" + detail::fp(ml + pw) + "\" y2=\"" + detail::fp(mt + ph) +
           "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + detail::fp(ml) + "\" y1=\"" + detail::fp(mt) +
           "\" x2=\"" + detail::fp(ml) + "\" y2=\"" + detail::fp(mt + ph) +
           "\" stroke=\"black\"/>\n";

    for (double t : detail::nice_ticks(xmin, xmax)) {
        const double x = sx(t);
        out += "<line x1=\"" + detail::fp(x) + "\" y1=\"" + detail::fp(mt + ph) +
               "\" x2=\"" + detail::fp(x) + "\" y2=\"" + detail::fp(mt + ph + 4) +
               "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + detail::fp(x) + "\" y=\"" + detail::fp(mt + ph + 16) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"10\">" +
               detail::tick_label(t) + "</text>\n";
    }
    for (double t : detail::nice_ticks(ymin, ymax)) {
        const double y = sy(t);
        out += "<line x1=\"" + detail::fp(ml - 4) + "\" y1=\"" + detail::fp(y) +
               "\" x2=\"" + detail::fp(ml) + "\" y2=\"" + detail::fp(y) +
               "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + detail::fp(ml - 7) + "\" y=\"" + detail::fp(y + 3) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"10\">" +
               detail::tick_label(t) + "</text>\n";
    }
    if (!chart.x_label.empty())
        out += "<text x=\"" + detail::fp(ml + pw / 2) + "\" y=\"" +
               detail::fp(mt + ph + 34) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"12\">" +
               detail::xml_escape(chart.x_label) + "</text>\n";
    if (!chart.y_label.empty())
        out += "<text x=\"14\" y=\"" + detail::fp(mt + ph / 2) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"12\" transform=\"rotate(-90 14 " +
               detail::fp(mt + ph / 2) + ")\">" +
               detail::xml_escape(chart.y_label) + "</text>\n";

    for (const auto& s : chart.series) {
        out += "<polyline class=\"" + detail::xml_escape(s.cls) +
               "\" fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"" +
               detail::fp(s.width) + "\"";
        if (s.opacity < 1.0) out += " stroke-opacity=\"" + detail::fp(s.opacity) + "\"";
        out += " points=\"";
        for (std::size_t k = 0; k < chart.x.size(); ++k) {
            if (k) out.push_back(' ');
            out += detail::fp(sx(chart.x[k])) + "," + detail::fp(sy(s.y[k]));
        }
        out += "\"/>\n";
    }

    // legend for labeled series
    double ly = mt + 8;
    for (const auto& s : chart.series) {
        if (s.label.empty()) continue;
        out += "<line x1=\"" + detail::fp(ml + pw - 150) + "\" y1=\"" +
               detail::fp(ly) + "\" x2=\"" + detail::fp(ml + pw - 130) +
               "\" y2=\"" + detail::fp(ly) + "\" stroke=\"" + s.color +
               "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + detail::fp(ml + pw - 125) + "\" y=\"" +
               detail::fp(ly + 3) +
               "\" font-family=\"sans-serif\" font-size=\"10\">" +
               detail::xml_escape(s.label) + "</text>\n";
        ly += 14;
    }

    out += "</svg>\n";
    return out;
}

}  // namespace repid

#endif  // REPID_SVG_HPP
