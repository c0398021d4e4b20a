#pragma once

#include <algorithm>
#include <string>

#include "randchain/analysis.hpp"
#include "randchain/io.hpp"

namespace randchain {

// Static line chart of a detection-rate curve: mean polyline with one
// point-and-whisker (mean +/- 1 std, clamped to [0,1]) per k. No external
// rendering dependency; the output is deterministic for identical input.
inline std::string render_curve_svg(const CurvePoints& curve,
                                    const std::string& title = "detection rate vs k") {
    const double width = 640.0, height = 420.0;
    const double left = 64.0, right = 20.0, top = 36.0, bottom = 52.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    int k_min = 1, k_max = 1;
    if (!curve.points.empty()) {
        k_min = curve.points.front().k;
        k_max = curve.points.back().k;
    }
    const double k_span = k_max > k_min ? static_cast<double>(k_max - k_min) : 1.0;
    auto x_of = [&](double k) {
        return left + (k - static_cast<double>(k_min)) / k_span * plot_w;
    };
    auto y_of = [&](double rate) { return top + (1.0 - rate) * plot_h; };
    auto num = [](double v) { return render_number(v); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
           "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
           num(height) + "\">\n";
    svg += "<rect width=\"" + num(width) + "\" height=\"" + num(height) +
           "\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(width / 2) + "\" y=\"20\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">" + title + "</text>\n";

    // axes
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) +
           "\" y2=\"" + num(top + plot_h) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" +
           num(left + plot_w) + "\" y2=\"" + num(top + plot_h) +
           "\" stroke=\"black\"/>\n";

    // y ticks at 0, 0.25, ..., 1
    for (int t = 0; t <= 4; ++t) {
        double rate = 0.25 * t;
        double y = y_of(rate);
        svg += "<line x1=\"" + num(left - 4) + "\" y1=\"" + num(y) + "\" x2=\"" +
               num(left) + "\" y2=\"" + num(y) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(left - 8) + "\" y=\"" + num(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               num(rate) + "</text>\n";
    }
    // x ticks at each k
    for (const CurvePoint& p : curve.points) {
        double x = x_of(static_cast<double>(p.k));
        svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" +
               num(x) + "\" y2=\"" + num(top + plot_h + 4) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(x) + "\" y=\"" + num(top + plot_h + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               std::to_string(p.k) + "</text>\n";
    }
    svg += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(height - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
           "random detectors (k)</text>\n";
    svg += "<text x=\"16\" y=\"" + num(top + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 " + num(top + plot_h / 2) + ")\">"
           "mean detection rate</text>\n";

    // whiskers first so the mean line draws over them
    for (const CurvePoint& p : curve.points) {
        double x = x_of(static_cast<double>(p.k));
        double lo = y_of(std::max(0.0, p.mean - p.std_dev));
        double hi = y_of(std::min(1.0, p.mean + p.std_dev));
        svg += "<line class=\"whisker\" x1=\"" + num(x) + "\" y1=\"" + num(lo) +
               "\" x2=\"" + num(x) + "\" y2=\"" + num(hi) +
               "\" stroke=\"#555555\"/>\n";
    }
    if (curve.points.size() > 1) {
        std::string pts;
        for (const CurvePoint& p : curve.points) {
            if (!pts.empty()) pts += ' ';
            pts += num(x_of(static_cast<double>(p.k))) + "," + num(y_of(p.mean));
        }
        svg += "<polyline points=\"" + pts +
               "\" fill=\"none\" stroke=\"#1f6fb5\" stroke-width=\"1.5\"/>\n";
    }
    for (const CurvePoint& p : curve.points) {
        svg += "<circle cx=\"" + num(x_of(static_cast<double>(p.k))) + "\" cy=\"" +
               num(y_of(p.mean)) + "\" r=\"3\" fill=\"#1f6fb5\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace randchain
