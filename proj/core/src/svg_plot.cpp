#include "mmsync/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mmsync {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
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

std::string num(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

std::string tick_label(double v) {
    std::ostringstream os;
    os << std::setprecision(3) << v;
    return os.str();
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool empty() const { return !(lo <= hi); }
};

}  // namespace

std::string render_svg(const PlotFigure& figure) {
    auto transform_y = [&](double y) { return figure.log_y ? std::log10(y) : y; };
    auto usable = [&](double y) { return std::isfinite(y) && (!figure.log_y || y > 0.0); };

    Range xr, yr;
    for (const auto& s : figure.series)
        for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
            if (!usable(s.y[k]) || !std::isfinite(s.x[k])) continue;
            xr.add(s.x[k]);
            yr.add(transform_y(s.y[k]));
        }
    if (xr.empty()) xr = {0.0, 1.0};
    if (yr.empty()) yr = {0.0, 1.0};
    if (xr.hi == xr.lo) { xr.lo -= 1.0; xr.hi += 1.0; }
    if (figure.log_y) {
        yr.lo = std::floor(yr.lo);
        yr.hi = std::ceil(yr.hi);
        if (yr.hi == yr.lo) yr.hi += 1.0;
    } else {
        const double pad = yr.hi == yr.lo ? 1.0 : 0.05 * (yr.hi - yr.lo);
        yr.lo -= pad;
        yr.hi += pad;
    }

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto py = [&](double ty) { return kTop + (yr.hi - ty) / (yr.hi - yr.lo) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(figure.title) << "</text>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    // x ticks: at most ~10
    const double x_span = xr.hi - xr.lo;
    const double raw_step = x_span / 10.0;
    const double magnitude = std::pow(10.0, std::floor(std::log10(raw_step)));
    double x_step = magnitude;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (m * magnitude >= raw_step) { x_step = m * magnitude; break; }
    for (double x = std::ceil(xr.lo / x_step) * x_step; x <= xr.hi + 1e-9 * x_span; x += x_step) {
        svg << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\"" << num(px(x))
            << "\" y2=\"" << num(kTop) << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + plot_h + 18)
            << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
    }

    const double y_span = yr.hi - yr.lo;
    double y_step = figure.log_y ? std::max(1.0, std::ceil(y_span / 8.0)) : y_span / 8.0;
    for (double ty = yr.lo; ty <= yr.hi + 1e-9 * y_span; ty += y_step) {
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << num(py(ty)) << "\" x2=\"" << num(kLeft + plot_w)
            << "\" y2=\"" << num(py(ty)) << "\" stroke=\"#dddddd\"/>\n";
        const std::string label = figure.log_y ? "1e" + tick_label(ty) : tick_label(ty);
        svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(ty) + 4) << "\" text-anchor=\"end\">"
            << label << "</text>\n";
    }

    svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 16)
        << "\" text-anchor=\"middle\">" << escape(figure.x_label) << "</text>\n";
    svg << "<text transform=\"translate(20," << num(kTop + plot_h / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">" << escape(figure.y_label) << "</text>\n";

    for (std::size_t i = 0; i < figure.series.size(); ++i) {
        const auto& s = figure.series[i];
        const char* colour = kPalette[i % kPalette.size()];
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.8\"";
        if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
        svg << " points=\"";
        bool first = true;
        for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
            if (!usable(s.y[k])) continue;
            svg << (first ? "" : " ") << num(px(s.x[k])) << ',' << num(py(transform_y(s.y[k])));
            first = false;
        }
        svg << "\"/>\n";

        const double ly = kTop + 14.0 + 18.0 * static_cast<double>(i);
        const double lx = kLeft + plot_w + 14.0;
        svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 24) << "\" y2=\""
            << num(ly) << "\" stroke=\"" << colour << "\" stroke-width=\"1.8\""
            << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
        svg << "<text x=\"" << num(lx + 30) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label)
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace mmsync
