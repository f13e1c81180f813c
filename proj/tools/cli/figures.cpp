#include "cli/figures.hpp"

#include <fstream>
#include <string>

#include "mmsync/errors.hpp"
#include "mmsync/svg_plot.hpp"

namespace mmsync::cli {

namespace {

PlotSeries series_for(const McReport& report, const std::string& parameter, double McCell::*field,
                      const std::string& label, bool dashed) {
    PlotSeries s;
    s.label = label;
    s.dashed = dashed;
    for (std::size_t i = 0; i < report.config.snr_grid_db.size(); ++i) {
        const McCell& c = report.cell(i, parameter);
        s.x.push_back(c.snr_db);
        s.y.push_back(c.*field);
    }
    return s;
}

void save(const std::filesystem::path& path, const PlotFigure& figure) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << render_svg(figure);
}

}  // namespace

std::vector<std::filesystem::path> write_campaign_figures(const McReport& report,
                                                          const std::filesystem::path& dir) {
    const std::size_t chains = report.config.l_r;
    std::vector<std::string> amplitude_group, angular_group;
    for (std::size_t i = 1; i <= chains; ++i) amplitude_group.push_back("alpha_" + std::to_string(i));
    amplitude_group.emplace_back("snr");
    for (std::size_t i = 1; i <= chains; ++i) angular_group.push_back("beta_" + std::to_string(i));
    angular_group.emplace_back("cfo");

    std::vector<std::filesystem::path> written;
    auto bias_figure = [&](const std::string& file, const std::string& title,
                           const std::vector<std::string>& group) {
        PlotFigure f{title, "SNR (dB)", "normalized bias", false, {}};
        for (const auto& p : group) f.series.push_back(series_for(report, p, &McCell::normalized_bias, p, false));
        save(dir / file, f);
        written.push_back(dir / file);
    };
    auto variance_figure = [&](const std::string& file, const std::string& title,
                               const std::vector<std::string>& group) {
        PlotFigure f{title, "SNR (dB)", "normalized variance", true, {}};
        for (const auto& p : group) {
            f.series.push_back(series_for(report, p, &McCell::normalized_variance, p, false));
            f.series.push_back(series_for(report, p, &McCell::normalized_crlb, "NCRLB " + p, true));
        }
        save(dir / file, f);
        written.push_back(dir / file);
    };

    bias_figure("bias_amplitude_snr.svg", "Normalized bias: amplitudes and SNR", amplitude_group);
    bias_figure("bias_angular.svg", "Normalized bias: phase offsets and CFO", angular_group);
    variance_figure("variance_amplitude_snr.svg", "Normalized variance and NCRLB: amplitudes and SNR",
                    amplitude_group);
    variance_figure("variance_angular.svg", "Normalized variance and NCRLB: phase offsets and CFO",
                    angular_group);
    return written;
}

}  // namespace mmsync::cli
