#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mmsync {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
/// Row-major so that each RF chain is a contiguous run of samples.
using CRowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Geometric channel description: N_r x N_t, C clusters with R_c rays each.
struct ChannelConfig {
    std::size_t n_tx = 32;
    std::size_t n_rx = 32;
    std::vector<std::size_t> rays_per_cluster{1};
    double path_loss = 1.0;
    std::uint64_t seed = 0;

    std::size_t clusters() const noexcept { return rays_per_cluster.size(); }
    std::size_t total_rays() const noexcept;
    void validate() const;
};

struct ChannelRealization {
    std::vector<cplx> gains;
    std::vector<double> aoa;
    std::vector<double> aod;
    CMatrix matrix;
    /// sqrt(N_r N_t / (rho_L * sum R_c)), folded into `gain_matrix()`.
    double scale = 1.0;

    /// A_R: one receive steering vector per ray.
    CMatrix rx_steering() const;
    /// A_T: one transmit steering vector per ray.
    CMatrix tx_steering() const;
    /// Diagonal G with the scaled ray gains, so that H = A_R G A_T^*.
    CMatrix gain_matrix() const;
};

/// Hybrid precoder/combiner pair with the noise whitener of the combiner.
struct FrontEnd {
    CMatrix precoder_rf;  // N_t x L_t, unit modulus
    CMatrix precoder_bb;  // L_t x N_s
    CMatrix combiner_rf;  // N_r x L_r, unit modulus
    CMatrix combiner_bb;  // L_r x L_r
    CVector spatial_filter;
    /// Upper-triangular D_w with D_w^* D_w = W^* W.
    CMatrix whitener;

    CMatrix precoder() const { return precoder_rf * precoder_bb; }
    CMatrix combiner() const { return combiner_rf * combiner_bb; }
    CMatrix noise_covariance() const;

    /// Builds a front end from explicit F and W (taken as purely digital
    /// factors) and computes the whitener. Throws CholeskyFailure.
    static FrontEnd from_matrices(const CMatrix& precoder, const CMatrix& combiner,
                                  const CVector& spatial_filter);
};

/// The unknowns: per-chain amplitude and phase, the CFO and noise variance.
struct SyncParams {
    std::vector<double> amplitudes;
    std::vector<double> phases;
    double cfo = 0.0;        // cycles/sample, [-1/2, 1/2)
    double noise_var = 1.0;  // per complex sample

    std::size_t chains() const noexcept { return amplitudes.size(); }
    /// alpha_i exp(j beta_i).
    CVector complex_gains() const;
    /// trace{P} = sum alpha_i^2.
    double trace_p() const;
    /// gamma_i = alpha_i^2 / sigma^2.
    std::vector<double> chain_snr() const;
    /// trace{P} / (L_r sigma^2).
    double average_snr() const;

    /// Checks the invariants. A zero noise variance is accepted so that
    /// noiseless blocks can be synthesized; the bounds reject it separately.
    void validate() const;

    static SyncParams from_gains(const CVector& gains, double cfo, double noise_var);
};

/// Unit-modulus training sequence t[n].
class TrainingBlock {
public:
    explicit TrainingBlock(std::vector<cplx> symbols);

    std::size_t size() const noexcept { return symbols_.size(); }
    std::span<const cplx> symbols() const noexcept { return symbols_; }
    const cplx& operator[](std::size_t n) const { return symbols_[n]; }

private:
    std::vector<cplx> symbols_;
};

/// Whitened L_r x N observation; row i holds chain i.
struct ReceivedBlock {
    CRowMatrix samples;

    std::size_t chains() const noexcept { return static_cast<std::size_t>(samples.rows()); }
    std::size_t length() const noexcept { return static_cast<std::size_t>(samples.cols()); }
    std::span<const cplx> chain(std::size_t i) const {
        return {samples.row(static_cast<Eigen::Index>(i)).data(), length()};
    }
};

/// ULA, half-wavelength spacing: entry k is exp(j pi k sin(angle)) / sqrt(n_ant).
CVector steering_vector(double angle, std::size_t n_ant);

/// Assembles H from explicit ray gains and angles (sizes must match the config).
ChannelRealization assemble_channel(const ChannelConfig& cfg, std::vector<cplx> gains,
                                    std::vector<double> aoa, std::vector<double> aod);

ChannelRealization gen_channel(const ChannelConfig& cfg);

/// Random hybrid front end. The spatial filter has n_s entries so that F q
/// is defined; the usual choice is n_s = l_tx.
FrontEnd gen_front_end(std::size_t n_tx, std::size_t n_rx, std::size_t l_tx, std::size_t l_rx,
                       std::size_t n_s, std::uint64_t seed);

/// D_w^{-*} W^* H F q.
CVector effective_gains(const FrontEnd& fe, const ChannelRealization& ch);

/// Normalized QPSK symbols, i.i.d. uniform over the four points.
TrainingBlock gen_training(std::size_t n, std::uint64_t seed);

/// Noise-free mean M(alpha, df) t as an L_r x N matrix.
CRowMatrix noiseless_mean(const SyncParams& params, const TrainingBlock& t);

/// Mean plus circular white noise of variance sigma^2 per complex sample.
ReceivedBlock synthesize(const SyncParams& params, const TrainingBlock& t, std::uint64_t seed);

}  // namespace mmsync
