#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmsync/estimators.hpp"
#include "mmsync/signal_model.hpp"

namespace mmsync {

enum class GainModel {
    uniform,  // alpha_i ~ U[0,1], beta_i ~ U[0, 2pi)
    channel,  // alpha from a random geometric channel and hybrid front end
};

struct McConfig {
    std::vector<double> snr_grid_db = default_snr_grid();
    std::size_t n_trials = 1000;
    std::size_t n = 64;
    std::size_t l_r = 4;
    std::size_t l_t = 4;
    std::size_t n_tx = 32;
    std::size_t n_rx = 32;
    std::size_t fft_size = 0;  // 0 selects 16 N rounded up to a power of two
    std::uint64_t seed = 1;
    bool redraw_params_per_trial = true;
    GainModel gain_model = GainModel::uniform;
    std::vector<std::size_t> rays_per_cluster{10, 10, 10, 10};
    double path_loss = 1.0;
    /// Used when redraw_params_per_trial is false. Empty amplitudes means
    /// "draw once from the master seed".
    std::vector<double> fixed_amplitudes;
    std::vector<double> fixed_phases;
    double fixed_cfo = 0.0;
    /// Worker threads; 0 means std::thread::hardware_concurrency().
    std::size_t threads = 0;

    std::size_t effective_fft_size() const { return fft_size == 0 ? default_fft_size(n) : fft_size; }
    void validate() const;

    /// -15 dB to 10 dB in 2.5 dB steps.
    static std::vector<double> default_snr_grid();
};

/// Report parameter names in output order:
/// alpha_1..alpha_L, beta_1..beta_L, cfo, noise_var, gamma_1..gamma_L, snr.
std::vector<std::string> report_parameters(std::size_t chains);

/// Estimation errors in report_parameters() order. Phase errors are wrapped
/// to (-pi, pi], CFO errors to [-1/2, 1/2).
std::vector<double> wrapped_error(const SyncParams& truth, const EstimateReport& est);

/// wrapped_error divided by the true value of each parameter. Throws
/// ZeroTruth when a true value is zero.
std::vector<double> normalized_error(const SyncParams& truth, const EstimateReport& est);

/// One (SNR point, parameter) cell.
///
/// Parameters are redrawn between trials, so the truth and its CRLB change
/// from trial to trial. With e the wrapped error, theta the truth and c the
/// numeric CRLB of a trial, and means taken over the effective trials:
///   normalized_bias     = mean(e) / sqrt(mean(theta^2))
///   normalized_crlb     = mean(c) / mean(theta^2)
///   efficiency          = mean(e^2 / c)
///   normalized_variance = efficiency * normalized_crlb
/// With fixed parameters these reduce to mean(e)/|theta|, mean(e^2)/theta^2
/// and c/theta^2.
struct McCell {
    double snr_db = 0.0;
    std::string parameter;
    double normalized_bias = 0.0;
    double normalized_variance = 0.0;
    double normalized_crlb = 0.0;
    std::size_t n_trials_effective = 0;
    double bias_std_error = 0.0;
    double efficiency = 0.0;
    double efficiency_std_error = 0.0;
};

struct McReport {
    McConfig config;
    std::vector<std::string> parameters;
    /// Grid-major: cells[s * parameters.size() + p].
    std::vector<McCell> cells;
    std::vector<std::size_t> failed_trials;   // per SNR point
    std::vector<std::size_t> redrawn_trials;  // per SNR point, ZeroTruth redraws

    const McCell& cell(std::size_t snr_index, std::size_t parameter_index) const {
        return cells[snr_index * parameters.size() + parameter_index];
    }
    const McCell& cell(std::size_t snr_index, const std::string& parameter) const;
};

McReport run_campaign(const McConfig& cfg);

/// snr_db,parameter,normalized_bias,normalized_variance,normalized_crlb,n_trials_effective
void write_report_csv(const McReport& report, std::ostream& out);

/// Configuration and aggregation conventions as a JSON document.
std::string report_metadata_json(const McReport& report);

}  // namespace mmsync
