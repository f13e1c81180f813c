#include "mmsync/signal_model.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "mmsync/angles.hpp"
#include "mmsync/errors.hpp"

namespace mmsync {

namespace {

cplx unit_phasor(double phase) { return std::polar(1.0, phase); }

// Draws from a caller-owned standard normal so its cached second variate is
// not thrown away between calls.
cplx circular_gaussian(std::mt19937_64& rng, std::normal_distribution<double>& normal,
                       double variance) {
    const double sd = std::sqrt(variance / 2.0);
    const double re = normal(rng);
    const double im = normal(rng);
    return {sd * re, sd * im};
}

CMatrix unit_modulus_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    CMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = unit_phasor(phase(rng));
    return m;
}

CMatrix column_normalized_gaussian(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::normal_distribution<double> normal;
    CMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = circular_gaussian(rng, normal, 1.0);
        m.col(c).normalize();
    }
    return m;
}

CMatrix cholesky_upper(const CMatrix& covariance) {
    Eigen::LLT<CMatrix> llt(covariance);
    if (llt.info() != Eigen::Success)
        throw CholeskyFailure("combiner Gram matrix W^*W is not positive definite");
    // LLT yields C = L L^*; the upper factor U = L^* satisfies U^* U = C.
    CMatrix upper = llt.matrixU();
    const double floor = 1e-12 * covariance.diagonal().real().maxCoeff();
    for (Eigen::Index i = 0; i < upper.rows(); ++i)
        if (std::abs(upper(i, i)) <= floor)
            throw CholeskyFailure("combiner Gram matrix W^*W is numerically singular");
    return upper;
}

}  // namespace

std::size_t ChannelConfig::total_rays() const noexcept {
    return std::accumulate(rays_per_cluster.begin(), rays_per_cluster.end(), std::size_t{0});
}

void ChannelConfig::validate() const {
    if (n_tx < 1 || n_rx < 1) throw InvalidParams("antenna counts must be at least 1");
    if (rays_per_cluster.empty()) throw InvalidParams("at least one cluster is required");
    for (std::size_t r : rays_per_cluster)
        if (r < 1) throw InvalidParams("every cluster needs at least one ray");
    if (!(path_loss > 0.0)) throw InvalidParams("path loss must be positive");
}

CMatrix ChannelRealization::rx_steering() const {
    const auto n_rx = static_cast<std::size_t>(matrix.rows());
    CMatrix a(matrix.rows(), static_cast<Eigen::Index>(aoa.size()));
    for (std::size_t k = 0; k < aoa.size(); ++k)
        a.col(static_cast<Eigen::Index>(k)) = steering_vector(aoa[k], n_rx);
    return a;
}

CMatrix ChannelRealization::tx_steering() const {
    const auto n_tx = static_cast<std::size_t>(matrix.cols());
    CMatrix a(matrix.cols(), static_cast<Eigen::Index>(aod.size()));
    for (std::size_t k = 0; k < aod.size(); ++k)
        a.col(static_cast<Eigen::Index>(k)) = steering_vector(aod[k], n_tx);
    return a;
}

CMatrix ChannelRealization::gain_matrix() const {
    CVector g(static_cast<Eigen::Index>(gains.size()));
    for (std::size_t k = 0; k < gains.size(); ++k) g(static_cast<Eigen::Index>(k)) = scale * gains[k];
    return g.asDiagonal();
}

CMatrix FrontEnd::noise_covariance() const {
    const CMatrix w = combiner();
    return w.adjoint() * w;
}

FrontEnd FrontEnd::from_matrices(const CMatrix& precoder, const CMatrix& combiner,
                                 const CVector& spatial_filter) {
    if (precoder.cols() != spatial_filter.size())
        throw DimensionMismatch("precoder columns must match the spatial filter length");
    FrontEnd fe;
    fe.precoder_rf = precoder;
    fe.precoder_bb = CMatrix::Identity(precoder.cols(), precoder.cols());
    fe.combiner_rf = combiner;
    fe.combiner_bb = CMatrix::Identity(combiner.cols(), combiner.cols());
    fe.spatial_filter = spatial_filter;
    fe.whitener = cholesky_upper(combiner.adjoint() * combiner);
    return fe;
}

CVector SyncParams::complex_gains() const {
    CVector g(static_cast<Eigen::Index>(chains()));
    for (std::size_t i = 0; i < chains(); ++i)
        g(static_cast<Eigen::Index>(i)) = std::polar(amplitudes[i], phases[i]);
    return g;
}

double SyncParams::trace_p() const {
    double s = 0.0;
    for (double a : amplitudes) s += a * a;
    return s;
}

std::vector<double> SyncParams::chain_snr() const {
    std::vector<double> g(chains());
    for (std::size_t i = 0; i < chains(); ++i) g[i] = amplitudes[i] * amplitudes[i] / noise_var;
    return g;
}

double SyncParams::average_snr() const {
    return trace_p() / (static_cast<double>(chains()) * noise_var);
}

void SyncParams::validate() const {
    if (amplitudes.empty()) throw InvalidParams("at least one RF chain is required");
    if (phases.size() != amplitudes.size())
        throw InvalidParams("amplitude and phase vectors differ in length");
    for (std::size_t i = 0; i < chains(); ++i) {
        if (!(amplitudes[i] >= 0.0) || !std::isfinite(amplitudes[i]))
            throw InvalidParams("amplitude " + std::to_string(i + 1) + " must be non-negative");
        if (!(phases[i] >= 0.0 && phases[i] < kTwoPi))
            throw InvalidParams("phase " + std::to_string(i + 1) + " must lie in [0, 2pi)");
    }
    if (!(cfo >= -0.5 && cfo < 0.5)) throw InvalidParams("cfo must lie in [-1/2, 1/2)");
    if (!(noise_var >= 0.0) || !std::isfinite(noise_var))
        throw InvalidParams("noise variance must be non-negative");
}

SyncParams SyncParams::from_gains(const CVector& gains, double cfo, double noise_var) {
    SyncParams p;
    p.amplitudes.reserve(static_cast<std::size_t>(gains.size()));
    p.phases.reserve(static_cast<std::size_t>(gains.size()));
    for (const cplx& g : gains) {
        p.amplitudes.push_back(std::abs(g));
        p.phases.push_back(wrap_two_pi(std::arg(g)));
    }
    p.cfo = cfo;
    p.noise_var = noise_var;
    return p;
}

TrainingBlock::TrainingBlock(std::vector<cplx> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.size() < 2) throw InvalidParams("training block needs at least two symbols");
    for (std::size_t n = 0; n < symbols_.size(); ++n)
        if (std::abs(std::abs(symbols_[n]) - 1.0) > 1e-9)
            throw InvalidParams("training symbol " + std::to_string(n) + " is not unit modulus");
}

CVector steering_vector(double angle, std::size_t n_ant) {
    if (n_ant < 1) throw InvalidParams("steering vector needs at least one antenna");
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_ant));
    const double spatial = kPi * std::sin(angle);
    CVector a(static_cast<Eigen::Index>(n_ant));
    for (std::size_t k = 0; k < n_ant; ++k)
        a(static_cast<Eigen::Index>(k)) = std::polar(norm, spatial * static_cast<double>(k));
    return a;
}

ChannelRealization assemble_channel(const ChannelConfig& cfg, std::vector<cplx> gains,
                                    std::vector<double> aoa, std::vector<double> aod) {
    cfg.validate();
    const std::size_t rays = cfg.total_rays();
    if (gains.size() != rays || aoa.size() != rays || aod.size() != rays)
        throw DimensionMismatch("ray parameter vectors must have sum(R_c) entries");

    ChannelRealization ch;
    ch.scale = std::sqrt(static_cast<double>(cfg.n_rx * cfg.n_tx) /
                         (cfg.path_loss * static_cast<double>(rays)));
    ch.matrix = CMatrix::Zero(static_cast<Eigen::Index>(cfg.n_rx), static_cast<Eigen::Index>(cfg.n_tx));
    for (std::size_t k = 0; k < rays; ++k) {
        const CVector a_r = steering_vector(aoa[k], cfg.n_rx);
        const CVector a_t = steering_vector(aod[k], cfg.n_tx);
        ch.matrix.noalias() += gains[k] * a_r * a_t.adjoint();
    }
    ch.matrix *= ch.scale;
    ch.gains = std::move(gains);
    ch.aoa = std::move(aoa);
    ch.aod = std::move(aod);
    return ch;
}

ChannelRealization gen_channel(const ChannelConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::normal_distribution<double> normal;
    const std::size_t rays = cfg.total_rays();
    std::vector<cplx> gains(rays);
    std::vector<double> aoa(rays), aod(rays);
    for (std::size_t k = 0; k < rays; ++k) {
        gains[k] = circular_gaussian(rng, normal, 1.0);
        aoa[k] = angle(rng);
        aod[k] = angle(rng);
    }
    return assemble_channel(cfg, std::move(gains), std::move(aoa), std::move(aod));
}

FrontEnd gen_front_end(std::size_t n_tx, std::size_t n_rx, std::size_t l_tx, std::size_t l_rx,
                       std::size_t n_s, std::uint64_t seed) {
    if (l_tx < 1 || l_rx < 1 || n_s < 1) throw InvalidParams("RF chain and stream counts must be at least 1");
    if (l_rx > n_rx || l_tx > n_tx || n_s > l_tx)
        throw InvalidParams("front end needs l_rx <= n_rx, l_tx <= n_tx, n_s <= l_tx");

    std::mt19937_64 rng(seed);
    FrontEnd fe;
    fe.precoder_rf = unit_modulus_matrix(rng, n_tx, l_tx);
    fe.precoder_bb = column_normalized_gaussian(rng, l_tx, n_s);
    fe.combiner_rf = unit_modulus_matrix(rng, n_rx, l_rx);
    fe.combiner_bb = column_normalized_gaussian(rng, l_rx, l_rx);

    std::uniform_int_distribution<int> quadrant(0, 3);
    fe.spatial_filter.resize(static_cast<Eigen::Index>(n_s));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_s));
    for (Eigen::Index k = 0; k < fe.spatial_filter.size(); ++k)
        fe.spatial_filter(k) = std::polar(scale, kPi / 4.0 + kPi / 2.0 * quadrant(rng));

    fe.whitener = cholesky_upper(fe.noise_covariance());
    return fe;
}

CVector effective_gains(const FrontEnd& fe, const ChannelRealization& ch) {
    const CMatrix f = fe.precoder();
    const CMatrix w = fe.combiner();
    if (w.rows() != ch.matrix.rows() || f.rows() != ch.matrix.cols() ||
        f.cols() != fe.spatial_filter.size() || fe.whitener.rows() != w.cols())
        throw DimensionMismatch("front end and channel dimensions disagree");
    const CVector combined = w.adjoint() * (ch.matrix * (f * fe.spatial_filter));
    // D_w^{-*} is the inverse of the lower-triangular D_w^*.
    return fe.whitener.adjoint().triangularView<Eigen::Lower>().solve(combined);
}

TrainingBlock gen_training(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw InvalidParams("training length must be at least 2");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> quadrant(0, 3);
    std::vector<cplx> symbols(n);
    for (auto& s : symbols) s = unit_phasor(kPi / 4.0 + kPi / 2.0 * quadrant(rng));
    return TrainingBlock(std::move(symbols));
}

CRowMatrix noiseless_mean(const SyncParams& params, const TrainingBlock& t) {
    const CVector gains = params.complex_gains();
    const auto n = static_cast<Eigen::Index>(t.size());
    CRowMatrix mean(gains.size(), n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx rotation = unit_phasor(kTwoPi * params.cfo * static_cast<double>(k));
        mean.col(k) = gains * (rotation * t[static_cast<std::size_t>(k)]);
    }
    return mean;
}

ReceivedBlock synthesize(const SyncParams& params, const TrainingBlock& t, std::uint64_t seed) {
    params.validate();
    ReceivedBlock block{noiseless_mean(params, t)};
    if (params.noise_var > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        for (Eigen::Index k = 0; k < block.samples.cols(); ++k)
            for (Eigen::Index i = 0; i < block.samples.rows(); ++i)
                block.samples(i, k) += circular_gaussian(rng, normal, params.noise_var);
    }
    return block;
}

}  // namespace mmsync
