#pragma once

#include <string>
#include <vector>

namespace mmsync {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct PlotFigure {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::vector<PlotSeries> series;
};

/// Renders a line chart as a standalone SVG document. On a log axis
/// non-positive values are dropped.
std::string render_svg(const PlotFigure& figure);

}  // namespace mmsync
