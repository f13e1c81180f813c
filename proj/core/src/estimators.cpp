#include "mmsync/estimators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mmsync/angles.hpp"
#include "mmsync/errors.hpp"
#include "mmsync/fft.hpp"

namespace mmsync {

namespace {

void require_same_length(std::span<const cplx> r_i, const TrainingBlock& t) {
    if (r_i.size() != t.size())
        throw DimensionMismatch("chain has " + std::to_string(r_i.size()) +
                                " samples but the training block has " + std::to_string(t.size()));
}

PhaseEstimate phase_of(cplx statistic) {
    if (statistic == cplx{0.0, 0.0}) return {0.0, true};
    return {wrap_two_pi(std::arg(statistic)), false};
}

}  // namespace

std::size_t default_fft_size(std::size_t n) {
    std::size_t k = 1;
    while (k < 16 * n) k <<= 1;
    return k;
}

std::vector<cplx> matched_filter(std::span<const cplx> r_i, const TrainingBlock& t) {
    require_same_length(r_i, t);
    std::vector<cplx> y(r_i.size());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = std::conj(t[k]) * r_i[k];
    return y;
}

PeakInterpolation parabolic_interp(double left, double center, double right) {
    if (!(center >= left && center >= right))
        throw InvalidParams("parabolic interpolation needs the center sample to be a local maximum");
    const double curvature = left - 2.0 * center + right;
    if (curvature == 0.0) return {0.0, center, true};
    const double offset = 0.5 * (left - right) / curvature;
    return {offset, center - 0.25 * (left - right) * offset, false};
}

cplx corrected_statistic(std::span<const cplx> r_i, const TrainingBlock& t, double cfo) {
    require_same_length(r_i, t);
    cplx sum = 0.0;
    for (std::size_t k = 0; k < r_i.size(); ++k)
        sum += r_i[k] * std::conj(t[k]) * std::polar(1.0, -kTwoPi * cfo * static_cast<double>(k));
    return sum;
}

double cfo_objective(const ReceivedBlock& r, const TrainingBlock& t, double cfo) {
    double total = 0.0;
    for (std::size_t i = 0; i < r.chains(); ++i) total += std::norm(corrected_statistic(r.chain(i), t, cfo));
    return total / static_cast<double>(t.size());
}

CfoEstimate estimate_cfo(const ReceivedBlock& r, const TrainingBlock& t, std::size_t fft_size) {
    const std::size_t n = t.size();
    if (r.length() != n) throw DimensionMismatch("received block length differs from training length");
    if (r.chains() == 0) throw DimensionMismatch("received block has no chains");
    if (fft_size < n || !is_power_of_two(fft_size))
        throw InvalidParams("FFT size must be a power of two no smaller than N");

    CfoEstimate est;
    est.search.spectrum.assign(fft_size, 0.0);
    est.search.matched_outputs.resize(static_cast<Eigen::Index>(r.chains()),
                                      static_cast<Eigen::Index>(fft_size));
    for (std::size_t i = 0; i < r.chains(); ++i) {
        const auto spectrum_i = fft_zero_padded(matched_filter(r.chain(i), t), fft_size);
        for (std::size_t k = 0; k < fft_size; ++k) {
            est.search.matched_outputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                spectrum_i[k];
            est.search.spectrum[k] += std::norm(spectrum_i[k]);
        }
    }

    const auto& s = est.search.spectrum;
    std::size_t best = 0;
    for (std::size_t k = 1; k < fft_size; ++k)
        if (s[k] > s[best]) best = k;  // strict: lowest index wins ties
    if (!(s[best] > 0.0) || !std::isfinite(s[best]))
        throw DegenerateSpectrum("matched-filter spectrum is identically zero");

    const double left = s[(best + fft_size - 1) % fft_size];
    const double right = s[(best + 1) % fft_size];
    const PeakInterpolation peak = parabolic_interp(left, s[best], right);

    est.peak_bin = best;
    est.peak_offset = peak.offset;
    est.cfo = wrap_cycle((static_cast<double>(best) + peak.offset) / static_cast<double>(fft_size));
    return est;
}

PhaseEstimate estimate_phase(std::span<const cplx> r_i, const TrainingBlock& t, double cfo_hat) {
    return phase_of(corrected_statistic(r_i, t, cfo_hat));
}

double estimate_amplitude(std::span<const cplx> r_i, const TrainingBlock& t, double cfo_hat) {
    return std::abs(corrected_statistic(r_i, t, cfo_hat)) / static_cast<double>(t.size());
}

double estimate_amplitude_projection(std::span<const cplx> r_i, const TrainingBlock& t,
                                     double cfo_hat, double beta_hat) {
    const cplx rotated = corrected_statistic(r_i, t, cfo_hat) * std::polar(1.0, -beta_hat);
    return rotated.real() / static_cast<double>(t.size());
}

double estimate_noise_var(const ReceivedBlock& r, const TrainingBlock& t, double cfo_hat,
                          std::span<const double> alpha_hat, std::span<const double> beta_hat) {
    const std::size_t chains = r.chains();
    const std::size_t n = t.size();
    if (r.length() != n) throw DimensionMismatch("received block length differs from training length");
    if (alpha_hat.size() != chains || beta_hat.size() != chains)
        throw DimensionMismatch("need one amplitude and phase estimate per chain");

    double residual = 0.0;
    for (std::size_t i = 0; i < chains; ++i) {
        const auto row = r.chain(i);
        const cplx gain = std::polar(alpha_hat[i], beta_hat[i]);
        for (std::size_t k = 0; k < n; ++k) {
            const cplx model = gain * std::polar(1.0, kTwoPi * cfo_hat * static_cast<double>(k)) * t[k];
            residual += std::norm(row[k] - model);
        }
    }
    return residual / static_cast<double>(chains * n);
}

EstimateReport estimate_all(const ReceivedBlock& r, const TrainingBlock& t, std::size_t fft_size) {
    const std::size_t n = t.size();
    const std::size_t chains = r.chains();
    if (fft_size == 0) fft_size = default_fft_size(n);

    const CfoEstimate cfo = estimate_cfo(r, t, fft_size);

    EstimateReport rep;
    rep.cfo_hat = cfo.cfo;
    rep.fft_size = fft_size;
    rep.peak_bin = cfo.peak_bin;
    rep.peak_offset = cfo.peak_offset;
    rep.beta_hat.resize(chains);
    rep.alpha_hat.resize(chains);
    for (std::size_t i = 0; i < chains; ++i) {
        const cplx statistic = corrected_statistic(r.chain(i), t, rep.cfo_hat);
        rep.beta_hat[i] = phase_of(statistic).phase;
        rep.alpha_hat[i] = std::abs(statistic) / static_cast<double>(n);
    }
    rep.noise_var_hat = estimate_noise_var(r, t, rep.cfo_hat, rep.alpha_hat, rep.beta_hat);

    rep.gamma_hat.resize(chains);
    if (rep.noise_var_hat > 0.0) {
        double sum = 0.0;
        for (std::size_t i = 0; i < chains; ++i) {
            rep.gamma_hat[i] = rep.alpha_hat[i] * rep.alpha_hat[i] / rep.noise_var_hat;
            sum += rep.gamma_hat[i];
        }
        rep.snr_hat = sum / static_cast<double>(chains);
    } else {
        rep.noiseless = true;
        const double inf = std::numeric_limits<double>::infinity();
        for (auto& g : rep.gamma_hat) g = inf;
        rep.snr_hat = inf;
    }
    return rep;
}

}  // namespace mmsync
