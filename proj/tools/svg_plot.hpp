#pragma once

#include <string>
#include <vector>

namespace udn::cli {

struct PlotSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> err;  // empty: rendered as a connected line
};

struct PanelSpec {
    std::string ylabel;
    PlotSeries line;    // analytic curve
    PlotSeries points;  // simulation estimates with error bars, may be empty
};

// Static stacked-panel SVG. log_x switches the shared x axis to decades.
std::string render_plot(const std::string& title, const std::string& xlabel, bool log_x,
                        const std::vector<PanelSpec>& panels);

}  // namespace udn::cli
