#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mmsync/signal_model.hpp"

namespace mmsync {

/// Result of fitting a parabola through three equally spaced samples.
struct PeakInterpolation {
    double offset = 0.0;      // peak location relative to the center sample, in bins
    double peak_value = 0.0;  // parabola value at `offset`
    bool flat = false;        // zero curvature; offset forced to 0
};

/// Per-chain matched-filter spectra and their sum across chains.
struct PeriodogramSearch {
    std::vector<double> spectrum;
    CRowMatrix matched_outputs;  // L_r x K
};

struct CfoEstimate {
    double cfo = 0.0;
    std::size_t peak_bin = 0;
    double peak_offset = 0.0;
    PeriodogramSearch search;
};

struct PhaseEstimate {
    double phase = 0.0;
    /// The matched-filter statistic was exactly zero; phase reported as 0.
    bool zero_statistic = false;
};

struct EstimateReport {
    double cfo_hat = 0.0;
    std::vector<double> beta_hat;
    std::vector<double> alpha_hat;
    double noise_var_hat = 0.0;
    std::vector<double> gamma_hat;
    double snr_hat = 0.0;
    std::size_t fft_size = 0;
    std::size_t peak_bin = 0;
    double peak_offset = 0.0;
    /// The residual was exactly zero; gamma_hat and snr_hat are +infinity.
    bool noiseless = false;
};

/// Smallest power of two >= 16 n.
std::size_t default_fft_size(std::size_t n);

/// y[n] = conj(t[n]) r_i[n].
std::vector<cplx> matched_filter(std::span<const cplx> r_i, const TrainingBlock& t);

/// Vertex of the parabola through (-1, left), (0, center), (1, right).
/// Requires center >= left and center >= right.
PeakInterpolation parabolic_interp(double left, double center, double right);

/// sum_n r_i[n] conj(t[n]) exp(-j 2 pi cfo n).
cplx corrected_statistic(std::span<const cplx> r_i, const TrainingBlock& t, double cfo);

/// (1/N) sum_i |corrected_statistic(r_i, t, cfo)|^2, the ML objective for the CFO.
double cfo_objective(const ReceivedBlock& r, const TrainingBlock& t, double cfo);

/// Summed periodogram search with parabolic refinement. `fft_size` must be a
/// power of two no smaller than N. Throws DegenerateSpectrum on all-zero input.
CfoEstimate estimate_cfo(const ReceivedBlock& r, const TrainingBlock& t, std::size_t fft_size);

PhaseEstimate estimate_phase(std::span<const cplx> r_i, const TrainingBlock& t, double cfo_hat);

/// (1/N) |corrected_statistic|.
double estimate_amplitude(std::span<const cplx> r_i, const TrainingBlock& t, double cfo_hat);

/// (1/N) sum_n Re{r_i[n] conj(t[n]) exp(-j beta) exp(-j 2 pi cfo n)}: the
/// amplitude before the phase estimate is substituted.
double estimate_amplitude_projection(std::span<const cplx> r_i, const TrainingBlock& t,
                                     double cfo_hat, double beta_hat);

/// Mean squared residual per complex sample after removing the fitted model.
double estimate_noise_var(const ReceivedBlock& r, const TrainingBlock& t, double cfo_hat,
                          std::span<const double> alpha_hat, std::span<const double> beta_hat);

/// Full chain: cfo, then phases, amplitudes, noise variance, per-chain and
/// average SNR. `fft_size == 0` selects default_fft_size(N).
EstimateReport estimate_all(const ReceivedBlock& r, const TrainingBlock& t, std::size_t fft_size = 0);

}  // namespace mmsync
