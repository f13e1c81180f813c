#include "mmsync/crlb.hpp"

#include <cmath>
#include <random>

#include "mmsync/angles.hpp"
#include "mmsync/errors.hpp"

namespace mmsync {

namespace {

void require_valid(const SyncParams& params, std::size_t n) {
    params.validate();
    if (n < 2) throw InvalidParams("training length must be at least 2");
    if (!(params.noise_var > 0.0)) throw InvalidParams("Fisher information needs sigma^2 > 0");
}

// sum_{n=0}^{N-1} (2 pi n) and sum_{n=0}^{N-1} (2 pi n)^2
double ramp_sum(std::size_t n) {
    const double nn = static_cast<double>(n);
    return kTwoPi * nn * (nn - 1.0) / 2.0;
}

double ramp_square_sum(std::size_t n) {
    const double nn = static_cast<double>(n);
    return kTwoPi * kTwoPi * nn * (nn - 1.0) * (2.0 * nn - 1.0) / 6.0;
}

}  // namespace

std::string ParamLayout::name(std::size_t index) const {
    if (index < chains) return "alpha_" + std::to_string(index + 1);
    if (index == noise_var()) return "noise_var";
    if (index == cfo()) return "cfo";
    return "beta_" + std::to_string(index - chains - 1);
}

Eigen::MatrixXd FisherMatrix::block_f1() const {
    const auto k = static_cast<Eigen::Index>(chains + 1);
    return matrix.topLeftCorner(k, k);
}

Eigen::MatrixXd FisherMatrix::block_f2() const {
    const auto k = static_cast<Eigen::Index>(chains + 1);
    return matrix.bottomRightCorner(k, k);
}

FisherMatrix fim(const SyncParams& params, std::size_t n) {
    require_valid(params, n);
    const std::size_t chains = params.chains();
    const ParamLayout at{chains};
    const double nn = static_cast<double>(n);
    const double s2 = params.noise_var;

    FisherMatrix f;
    f.chains = chains;
    const auto dim = static_cast<Eigen::Index>(at.dim());
    f.matrix = Eigen::MatrixXd::Zero(dim, dim);
    auto entry = [&f](std::size_t r, std::size_t c) -> double& {
        return f.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    };

    for (std::size_t i = 0; i < chains; ++i) entry(at.alpha(i), at.alpha(i)) = 2.0 * nn / s2;
    entry(at.noise_var(), at.noise_var()) = static_cast<double>(chains) * nn / (s2 * s2);

    entry(at.cfo(), at.cfo()) = 2.0 / s2 * params.trace_p() * ramp_square_sum(n);
    for (std::size_t i = 0; i < chains; ++i) {
        const double a2 = params.amplitudes[i] * params.amplitudes[i];
        entry(at.beta(i), at.beta(i)) = 2.0 * nn * a2 / s2;
        const double cross = 2.0 * a2 / s2 * ramp_sum(n);
        entry(at.cfo(), at.beta(i)) = cross;
        entry(at.beta(i), at.cfo()) = cross;
    }
    return f;
}

double crlb_closed_alpha(const SyncParams& params, std::size_t n) {
    require_valid(params, n);
    return params.noise_var / (2.0 * static_cast<double>(n));
}

double crlb_closed_noise_var(const SyncParams& params, std::size_t n) {
    require_valid(params, n);
    return params.noise_var * params.noise_var /
           (static_cast<double>(params.chains()) * static_cast<double>(n));
}

double crlb_closed_gamma(double gamma, std::size_t n) {
    const double nn = static_cast<double>(n);
    return 4.0 * gamma / nn + gamma * gamma / nn;
}

double crlb_closed_snr(double snr, std::size_t chains, std::size_t n) {
    const double ln = static_cast<double>(chains) * static_cast<double>(n);
    return 2.0 * snr / ln + snr * snr / ln;
}

double crlb_printed_cfo(const SyncParams& params, std::size_t n) {
    require_valid(params, n);
    const double nn = static_cast<double>(n);
    const double n_pow = std::pow(nn, static_cast<double>(params.chains()));
    const double tr = params.trace_p();
    double denominator = nn * (nn - 1.0) * (2.0 * nn - 1.0) / 6.0 * tr * n_pow;
    for (double a : params.amplitudes) denominator -= a * a * (nn * (nn + 1.0) * (nn + 1.0) / 4.0) * n_pow;
    return params.noise_var / 2.0 * n_pow / denominator;
}

std::vector<double> crlb_printed_beta(const SyncParams& params, std::size_t n) {
    require_valid(params, n);
    const std::size_t chains = params.chains();
    const double nn = static_cast<double>(n);
    const double n_pow = std::pow(nn, static_cast<double>(chains));
    const double tr = params.trace_p();
    const auto& a = params.amplitudes;

    double denominator = nn * (nn - 1.0) * (2.0 * nn - 1.0) / 6.0 * tr * n_pow;
    for (double ak : a) denominator -= ak * ak * (nn * (nn + 1.0) * (nn + 1.0) / 4.0) * n_pow;

    std::vector<double> bounds(chains);
    for (std::size_t i = 0; i < chains; ++i) {
        double others = 1.0;
        for (std::size_t j = 0; j < chains; ++j)
            if (j != i) others *= a[j] * a[j];
        double numerator = (nn - 1.0) * (2.0 * nn - 1.0) / 6.0 * tr * n_pow * others;
        for (std::size_t k = 0; k < chains; ++k) {
            if (k == i) continue;
            double rest = 1.0;
            for (std::size_t s = 0; s < chains; ++s)
                if (s != k && s != i) rest *= a[s] * a[s];
            numerator -= std::pow(a[k], 4) * ((nn + 1.0) * (nn + 1.0) / 4.0) * n_pow * rest;
        }
        bounds[i] = params.noise_var / 2.0 * numerator / denominator;
    }
    return bounds;
}

Eigen::MatrixXd fim_inverse(const FisherMatrix& f) {
    const ParamLayout at = f.layout();
    for (std::size_t i = 0; i < f.chains; ++i) {
        const auto b = static_cast<Eigen::Index>(at.beta(i));
        if (!(f.matrix(b, b) > 0.0))
            throw SingularFim(i + 1, "chain " + std::to_string(i + 1) +
                                         " has zero amplitude; its phase is unidentifiable");
    }

    const auto dim = static_cast<Eigen::Index>(at.dim());
    const auto k = static_cast<Eigen::Index>(f.chains + 1);
    Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(dim, dim);
    // F1 is diagonal.
    for (Eigen::Index i = 0; i < k; ++i) inv(i, i) = 1.0 / f.matrix(i, i);

    const Eigen::MatrixXd f2 = f.block_f2();
    Eigen::LLT<Eigen::MatrixXd> llt(f2);
    if (llt.info() != Eigen::Success) throw SingularFim(0, "F2 block is not positive definite");
    inv.bottomRightCorner(k, k) = llt.solve(Eigen::MatrixXd::Identity(k, k));
    return inv;
}

double transformed_bound(const Eigen::MatrixXd& fim_inv, const Eigen::VectorXd& gradient) {
    if (gradient.size() != fim_inv.rows()) throw DimensionMismatch("gradient size differs from FIM");
    return gradient.dot(fim_inv * gradient);
}

CrlbReport crlb_numeric(const SyncParams& params, std::size_t n, CfoPhaseBound source) {
    const FisherMatrix f = fim(params, n);
    const Eigen::MatrixXd inv = fim_inverse(f);
    const ParamLayout at = f.layout();
    const std::size_t chains = f.chains;
    auto diag = [&inv](std::size_t i) {
        return inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    };

    CrlbReport rep;
    rep.var_noise_var = diag(at.noise_var());
    rep.var_cfo = diag(at.cfo());
    for (std::size_t i = 0; i < chains; ++i) {
        rep.var_alpha.push_back(diag(at.alpha(i)));
        rep.var_beta.push_back(diag(at.beta(i)));
    }
    if (source == CfoPhaseBound::printed) {
        rep.var_cfo = crlb_printed_cfo(params, n);
        rep.var_beta = crlb_printed_beta(params, n);
    }

    const double s2 = params.noise_var;
    const auto dim = static_cast<Eigen::Index>(at.dim());
    const auto noise = static_cast<Eigen::Index>(at.noise_var());
    Eigen::VectorXd snr_grad = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < chains; ++i) {
        const double a = params.amplitudes[i];
        const auto ai = static_cast<Eigen::Index>(at.alpha(i));
        Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
        g(ai) = 2.0 * a / s2;
        g(noise) = -a * a / (s2 * s2);
        rep.var_gamma.push_back(transformed_bound(inv, g));
        rep.var_gamma_closed.push_back(crlb_closed_gamma(a * a / s2, n));
        snr_grad(ai) = g(ai) / static_cast<double>(chains);
    }
    snr_grad(noise) = -params.average_snr() / s2;
    rep.var_snr = transformed_bound(inv, snr_grad);
    return rep;
}

Eigen::VectorXd score(const SyncParams& params, const TrainingBlock& t, const ReceivedBlock& r) {
    params.validate();
    if (!(params.noise_var > 0.0)) throw InvalidParams("score needs sigma^2 > 0");
    if (r.chains() != params.chains() || r.length() != t.size())
        throw DimensionMismatch("received block does not match parameters and training");

    const std::size_t chains = params.chains();
    const std::size_t n = t.size();
    const ParamLayout at{chains};
    const double s2 = params.noise_var;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(at.dim()));

    double cfo_term = 0.0;
    double residual = 0.0;
    for (std::size_t i = 0; i < chains; ++i) {
        const auto row = r.chain(i);
        const double a = params.amplitudes[i];
        const cplx derotate = std::polar(1.0, -params.phases[i]);
        const cplx gain = std::polar(a, params.phases[i]);
        cplx statistic = 0.0;
        double weighted_im = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const cplx carrier = std::polar(1.0, kTwoPi * params.cfo * static_cast<double>(k));
            const cplx term = std::conj(t[k] * carrier) * row[k] * derotate;
            statistic += term;
            weighted_im += kTwoPi * static_cast<double>(k) * term.imag();
            residual += std::norm(row[k] - gain * carrier * t[k]);
        }
        g(static_cast<Eigen::Index>(at.alpha(i))) =
            2.0 / s2 * (statistic.real() - a * static_cast<double>(n));
        g(static_cast<Eigen::Index>(at.beta(i))) = 2.0 / s2 * a * statistic.imag();
        cfo_term += a * weighted_im;
    }
    g(static_cast<Eigen::Index>(at.cfo())) = 2.0 / s2 * cfo_term;
    g(static_cast<Eigen::Index>(at.noise_var())) =
        -static_cast<double>(chains * n) / s2 + residual / (s2 * s2);
    return g;
}

bool ScoreStatistic::within(double sigmas) const noexcept {
    return std::abs(mean) <= sigmas * std_error;
}

bool RegularityResult::passes(double sigmas) const noexcept {
    for (const auto& s : scores)
        if (!s.within(sigmas)) return false;
    return !scores.empty();
}

RegularityResult regularity_check(const SyncParams& params, const TrainingBlock& t,
                                  std::size_t n_trials, std::uint64_t seed) {
    if (n_trials < 100) throw InvalidParams("regularity check needs at least 100 trials");
    const FisherMatrix f = fim(params, t.size());
    const ParamLayout at = f.layout();
    const auto dim = static_cast<Eigen::Index>(at.dim());

    // Welford accumulation, one stream of block seeds.
    std::mt19937_64 seeds(seed);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd m2 = Eigen::VectorXd::Zero(dim);
    for (std::size_t trial = 0; trial < n_trials; ++trial) {
        const ReceivedBlock r = synthesize(params, t, seeds());
        const Eigen::VectorXd s = score(params, t, r);
        const Eigen::VectorXd delta = s - mean;
        mean += delta / static_cast<double>(trial + 1);
        m2 += delta.cwiseProduct(s - mean);
    }

    RegularityResult result;
    result.trials = n_trials;
    const double count = static_cast<double>(n_trials);
    for (Eigen::Index i = 0; i < dim; ++i) {
        ScoreStatistic st;
        st.name = at.name(static_cast<std::size_t>(i));
        st.mean = mean(i);
        st.variance = m2(i) / (count - 1.0);
        st.std_error = std::sqrt(st.variance / count);
        st.fisher = f.matrix(i, i);
        result.scores.push_back(st);
    }
    return result;
}

}  // namespace mmsync
