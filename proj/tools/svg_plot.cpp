#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace udn::cli {

namespace {

constexpr double kWidth = 760.0;
constexpr double kPanelH = 280.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 25.0;
constexpr double kTop = 46.0;
constexpr double kGap = 56.0;
constexpr double kBottom = 58.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void take(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    bool ok() const { return lo <= hi; }

    void pad() {
        if (!ok()) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi == lo) {
            lo -= 0.5;
            hi += 0.5;
        } else {
            const double d = 0.05 * (hi - lo);
            lo -= d;
            hi += d;
        }
    }
};

std::vector<double> linear_ticks(const Range& r, int target) {
    const double span = r.hi - r.lo;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (const double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    }
    std::vector<double> t;
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-9 * step; v += step) {
        t.push_back(v == 0.0 ? 0.0 : v);
    }
    return t;
}

std::vector<double> decade_ticks(const Range& r) {
    std::vector<double> t;
    for (int e = static_cast<int>(std::ceil(r.lo - 1e-9)); e <= std::floor(r.hi + 1e-9); ++e) {
        t.push_back(static_cast<double>(e));
    }
    return t;
}

}  // namespace

std::string render_plot(const std::string& title, const std::string& xlabel, bool log_x,
                        const std::vector<PanelSpec>& panels) {
    const auto n = panels.size();
    const double height = kTop + kPanelH * static_cast<double>(n) +
                          kGap * static_cast<double>(n > 0 ? n - 1 : 0) + kBottom;
    const double plot_w = kWidth - kLeft - kRight;

    auto xval = [log_x](double x) { return log_x ? std::log10(x) : x; };

    Range xr;
    for (const PanelSpec& p : panels) {
        for (double x : p.line.x) xr.take(xval(x));
        for (double x : p.points.x) xr.take(xval(x));
    }
    xr.pad();

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(height) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" + title + "</text>\n";

    auto to_px_x = [&](double x) {
        return kLeft + (xval(x) - xr.lo) / (xr.hi - xr.lo) * plot_w;
    };

    for (size_t pi = 0; pi < n; ++pi) {
        const PanelSpec& p = panels[pi];
        const double top = kTop + static_cast<double>(pi) * (kPanelH + kGap);
        const double bot = top + kPanelH;

        Range yr;
        for (double y : p.line.y) yr.take(y);
        for (size_t i = 0; i < p.points.y.size(); ++i) {
            const double e = i < p.points.err.size() ? p.points.err[i] : 0.0;
            yr.take(p.points.y[i] - e);
            yr.take(p.points.y[i] + e);
        }
        yr.pad();
        auto to_px_y = [&](double y) { return bot - (y - yr.lo) / (yr.hi - yr.lo) * kPanelH; };

        s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) +
             "\" height=\"" + num(kPanelH) + "\" fill=\"none\" stroke=\"#444\"/>\n";

        const std::vector<double> xticks =
            log_x ? decade_ticks(xr) : linear_ticks(xr, 6);
        for (double t : xticks) {
            const double px = kLeft + (t - xr.lo) / (xr.hi - xr.lo) * plot_w;
            if (px < kLeft - 0.5 || px > kLeft + plot_w + 0.5) continue;
            s += "<line x1=\"" + num(px) + "\" y1=\"" + num(bot) + "\" x2=\"" + num(px) +
                 "\" y2=\"" + num(bot + 5) + "\" stroke=\"#444\"/>\n";
            const std::string lab = log_x ? "1e" + label(t) : label(t);
            s += "<text x=\"" + num(px) + "\" y=\"" + num(bot + 19) +
                 "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + lab +
                 "</text>\n";
        }
        for (double t : linear_ticks(yr, 5)) {
            const double py = to_px_y(t);
            if (py < top - 0.5 || py > bot + 0.5) continue;
            s += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(py) + "\" x2=\"" +
                 num(kLeft) + "\" y2=\"" + num(py) + "\" stroke=\"#444\"/>\n";
            s += "<text x=\"" + num(kLeft - 9) + "\" y=\"" + num(py + 4) +
                 "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
                 label(t) + "</text>\n";
        }

        s += "<text x=\"20\" y=\"" + num(top + kPanelH / 2) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
             "transform=\"rotate(-90 20 " + num(top + kPanelH / 2) + ")\">" + p.ylabel +
             "</text>\n";

        if (!p.line.x.empty()) {
            s += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.6\" points=\"";
            for (size_t i = 0; i < p.line.x.size(); ++i) {
                if (i) s += " ";
                s += num(to_px_x(p.line.x[i])) + "," + num(to_px_y(p.line.y[i]));
            }
            s += "\"/>\n";
        }
        for (size_t i = 0; i < p.points.x.size(); ++i) {
            const double px = to_px_x(p.points.x[i]);
            const double py = to_px_y(p.points.y[i]);
            if (i < p.points.err.size() && p.points.err[i] > 0.0) {
                const double y1 = to_px_y(p.points.y[i] - p.points.err[i]);
                const double y2 = to_px_y(p.points.y[i] + p.points.err[i]);
                s += "<line x1=\"" + num(px) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(px) +
                     "\" y2=\"" + num(y2) + "\" stroke=\"#d62728\"/>\n";
                for (double yy : {y1, y2}) {
                    s += "<line x1=\"" + num(px - 3) + "\" y1=\"" + num(yy) + "\" x2=\"" +
                         num(px + 3) + "\" y2=\"" + num(yy) + "\" stroke=\"#d62728\"/>\n";
                }
            }
            s += "<rect x=\"" + num(px - 2.5) + "\" y=\"" + num(py - 2.5) +
                 "\" width=\"5\" height=\"5\" fill=\"#d62728\"/>\n";
        }
    }

    s += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(height - 16) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + xlabel +
         "</text>\n";
    s += "</svg>\n";
    return s;
}

}  // namespace udn::cli
