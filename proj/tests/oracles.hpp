// Independent reference computations used only by the tests. Nothing here
// calls into the library's estimators or bounds.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mmsync/signal_model.hpp"

namespace oracle {

using cplx = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Parameter vector in FIM order (alpha_1..alpha_L, sigma^2, df, beta_1..beta_L).
inline std::vector<double> pack(const mmsync::SyncParams& p) {
    std::vector<double> xi(p.amplitudes);
    xi.push_back(p.noise_var);
    xi.push_back(p.cfo);
    xi.insert(xi.end(), p.phases.begin(), p.phases.end());
    return xi;
}

// mu(xi) stacked as chain-major samples: mu[i*N + n].
inline std::vector<cplx> mean_vector(const std::vector<double>& xi, std::size_t chains,
                                     const std::vector<cplx>& t) {
    const std::size_t n = t.size();
    const double df = xi[chains + 1];
    std::vector<cplx> mu(chains * n);
    for (std::size_t i = 0; i < chains; ++i) {
        const double a = xi[i];
        const double b = xi[chains + 2 + i];
        for (std::size_t k = 0; k < n; ++k) {
            const double phase = b + kTwoPi * df * static_cast<double>(k);
            mu[i * n + k] = a * cplx(std::cos(phase), std::sin(phase)) * t[k];
        }
    }
    return mu;
}

// Slepian-Bangs FIM for r ~ CN(mu(xi), sigma^2(xi) I) with both mean and
// covariance derivatives taken by central differences.
inline Eigen::MatrixXd finite_difference_fim(const mmsync::SyncParams& p, const std::vector<cplx>& t) {
    const std::size_t chains = p.chains();
    const std::vector<double> xi = pack(p);
    const std::size_t dim = xi.size();
    const std::size_t m = chains * t.size();

    std::vector<std::vector<cplx>> dmu(dim);
    std::vector<double> dvar(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(xi[j]));
        auto plus = xi, minus = xi;
        plus[j] += h;
        minus[j] -= h;
        const auto mp = mean_vector(plus, chains, t);
        const auto mm = mean_vector(minus, chains, t);
        dmu[j].resize(m);
        for (std::size_t k = 0; k < m; ++k) dmu[j][k] = (mp[k] - mm[k]) / (2.0 * h);
        dvar[j] = (plus[chains] - minus[chains]) / (2.0 * h);
    }

    const double var = xi[chains];
    Eigen::MatrixXd f(dim, dim);
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = 0; b < dim; ++b) {
            cplx inner = 0.0;
            for (std::size_t k = 0; k < m; ++k) inner += std::conj(dmu[a][k]) * dmu[b][k];
            // tr(C^-1 dC_a C^-1 dC_b) with C = var * I of size m.
            const double trace_term = static_cast<double>(m) * dvar[a] * dvar[b] / (var * var);
            f(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = 2.0 / var * inner.real() + trace_term;
        }
    }
    return f;
}

// D_w^{-*} W^* H F q with explicit loops: whitener inverse by back substitution.
inline std::vector<cplx> naive_effective_gains(const mmsync::FrontEnd& fe, const Eigen::MatrixXcd& h) {
    const Eigen::MatrixXcd f = fe.precoder();
    const Eigen::MatrixXcd w = fe.combiner();
    const auto nr = static_cast<std::size_t>(h.rows());
    const auto nt = static_cast<std::size_t>(h.cols());
    const auto lr = static_cast<std::size_t>(w.cols());
    const auto ns = static_cast<std::size_t>(f.cols());

    std::vector<cplx> fq(nt, 0.0);
    for (std::size_t a = 0; a < nt; ++a)
        for (std::size_t s = 0; s < ns; ++s)
            fq[a] += f(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(s)) *
                     fe.spatial_filter(static_cast<Eigen::Index>(s));
    std::vector<cplx> hfq(nr, 0.0);
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t a = 0; a < nt; ++a)
            hfq[r] += h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a)) * fq[a];
    std::vector<cplx> y(lr, 0.0);
    for (std::size_t l = 0; l < lr; ++l)
        for (std::size_t r = 0; r < nr; ++r)
            y[l] += std::conj(w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l))) * hfq[r];

    // Solve D_w^* x = y; D_w^* is lower triangular.
    std::vector<cplx> x(lr, 0.0);
    for (std::size_t i = 0; i < lr; ++i) {
        cplx acc = y[i];
        for (std::size_t k = 0; k < i; ++k)
            acc -= std::conj(fe.whitener(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i))) * x[k];
        x[i] = acc / std::conj(fe.whitener(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
    }
    return x;
}

// Dense triple-loop product A B.
inline Eigen::MatrixXcd naive_product(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
            for (Eigen::Index k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
    return c;
}

// Argmax of (1/N) sum_i |sum_n r_i[n] conj(t[n]) e^{-j 2 pi f n}|^2 over a
// uniform grid of `points` frequencies in [-1/2, 1/2), by direct evaluation.
inline double grid_cfo(const mmsync::ReceivedBlock& r, const std::vector<cplx>& t, std::size_t points,
                       double lo = -0.5, double hi = 0.5) {
    double best_f = lo, best = -1.0;
    for (std::size_t g = 0; g < points; ++g) {
        const double f = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(points);
        double total = 0.0;
        for (std::size_t i = 0; i < r.chains(); ++i) {
            const auto row = r.chain(i);
            cplx acc = 0.0;
            for (std::size_t k = 0; k < t.size(); ++k) {
                const double ph = -kTwoPi * f * static_cast<double>(k);
                acc += row[k] * std::conj(t[k]) * cplx(std::cos(ph), std::sin(ph));
            }
            total += std::norm(acc);
        }
        if (total > best) {
            best = total;
            best_f = f;
        }
    }
    return best_f;
}

inline double circular_distance(double a, double b, double period) {
    double d = std::fmod(std::abs(a - b), period);
    return std::min(d, period - d);
}

}  // namespace oracle
