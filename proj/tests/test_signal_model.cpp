#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "mmsync/angles.hpp"
#include "mmsync/errors.hpp"
#include "mmsync/signal_model.hpp"
#include "oracles.hpp"

using namespace mmsync;

namespace {

double rel_frobenius(const CMatrix& a, const CMatrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace

TEST_CASE("steering vector") {
    const CVector a = steering_vector(0.0, 4);
    for (Eigen::Index k = 0; k < 4; ++k) CHECK(std::abs(a(k) - cplx(0.5, 0.0)) < 1e-15);

    const CVector b = steering_vector(kPi / 2, 2);
    CHECK(std::abs(b(0) - cplx(std::sqrt(0.5), 0.0)) < 1e-12);
    CHECK(std::abs(b(1) - cplx(-std::sqrt(0.5), 0.0)) < 1e-12);

    CHECK(steering_vector(0.3, 8).norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(steering_vector(0.3, 0), InvalidParams);
}

TEST_CASE("angle wrapping") {
    CHECK(wrap_two_pi(-0.1) == doctest::Approx(kTwoPi - 0.1));
    CHECK(wrap_two_pi(kTwoPi) == 0.0);
    CHECK(wrap_pi(kPi) == doctest::Approx(kPi));
    CHECK(wrap_pi(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_cycle(0.5) == doctest::Approx(-0.5));
    CHECK(wrap_cycle(-0.98) == doctest::Approx(0.02));
    for (double x = -20.0; x < 20.0; x += 0.37) {
        CHECK(wrap_two_pi(x) >= 0.0);
        CHECK(wrap_two_pi(x) < kTwoPi);
        CHECK(wrap_cycle(x) >= -0.5);
        CHECK(wrap_cycle(x) < 0.5);
    }
}

TEST_CASE("gen_channel") {
    SUBCASE("single ray at broadside gives an all-ones matrix") {
        ChannelConfig cfg;
        cfg.n_tx = 2;
        cfg.n_rx = 2;
        cfg.rays_per_cluster = {1};
        const auto ch = assemble_channel(cfg, {cplx(1.0, 0.0)}, {0.0}, {0.0});
        CHECK(ch.matrix.rows() == 2);
        CHECK((ch.matrix - CMatrix::Ones(2, 2)).norm() < 1e-12);
    }
    SUBCASE("compact form and determinism") {
        ChannelConfig cfg;
        cfg.rays_per_cluster = {10, 10, 10, 10};
        cfg.path_loss = 2.5;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            cfg.seed = seed;
            const auto ch = gen_channel(cfg);
            const CMatrix compact = ch.rx_steering() * ch.gain_matrix() * ch.tx_steering().adjoint();
            CHECK(rel_frobenius(ch.matrix, compact) < 1e-12);
            const CMatrix naive = oracle::naive_product(
                oracle::naive_product(ch.rx_steering(), ch.gain_matrix()), ch.tx_steering().adjoint());
            CHECK(rel_frobenius(ch.matrix, naive) < 1e-12);
            for (double a : ch.aoa) CHECK((a >= 0.0 && a < kTwoPi));
            const auto again = gen_channel(cfg);
            CHECK(again.matrix == ch.matrix);
            CHECK(again.gains == ch.gains);
        }
    }
    SUBCASE("invalid configurations") {
        ChannelConfig cfg;
        cfg.rays_per_cluster = {};
        CHECK_THROWS_AS(gen_channel(cfg), InvalidParams);
        cfg.rays_per_cluster = {3, 0};
        CHECK_THROWS_AS(gen_channel(cfg), InvalidParams);
        cfg.rays_per_cluster = {3};
        cfg.path_loss = 0.0;
        CHECK_THROWS_AS(gen_channel(cfg), InvalidParams);
    }
}

TEST_CASE("gen_front_end") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const FrontEnd fe = gen_front_end(32, 32, 4, 4, 4, seed);
        for (Eigen::Index i = 0; i < fe.combiner_rf.size(); ++i)
            CHECK(std::abs(std::abs(fe.combiner_rf(i)) - 1.0) < 1e-12);
        for (Eigen::Index i = 0; i < fe.precoder_rf.size(); ++i)
            CHECK(std::abs(std::abs(fe.precoder_rf(i)) - 1.0) < 1e-12);
        CHECK(fe.spatial_filter.norm() == doctest::Approx(1.0).epsilon(1e-12));

        const CMatrix w = fe.combiner();
        const CMatrix cw = w.adjoint() * w;
        CHECK((fe.whitener.adjoint() * fe.whitener - cw).norm() < 1e-10);
        CHECK((cw - cw.adjoint()).norm() < 1e-12);
        const CMatrix dinv = fe.whitener.inverse();
        CHECK((dinv.adjoint() * cw * dinv - CMatrix::Identity(4, 4)).norm() < 1e-10);
        for (Eigen::Index i = 1; i < 4; ++i)
            for (Eigen::Index j = 0; j < i; ++j) CHECK(fe.whitener(i, j) == cplx(0.0, 0.0));

        const FrontEnd again = gen_front_end(32, 32, 4, 4, 4, seed);
        CHECK(again.combiner_rf == fe.combiner_rf);
        CHECK(again.precoder_bb == fe.precoder_bb);
        CHECK(again.whitener == fe.whitener);
    }
    SUBCASE("orthonormal combiner has identity whitener") {
        const CMatrix f = CMatrix::Identity(4, 2);
        const CMatrix w = CMatrix::Identity(4, 3);
        const FrontEnd fe = FrontEnd::from_matrices(f, w, CVector::Ones(2) / std::sqrt(2.0));
        CHECK((fe.whitener - CMatrix::Identity(3, 3)).norm() < 1e-14);
    }
    SUBCASE("rank deficient combiner") {
        CMatrix w = CMatrix::Zero(4, 2);
        w(0, 0) = 1.0;
        w(0, 1) = 1.0;
        CHECK_THROWS_AS(FrontEnd::from_matrices(CMatrix::Identity(4, 1), w, CVector::Ones(1)), CholeskyFailure);
    }
    CHECK_THROWS_AS(gen_front_end(32, 32, 4, 40, 4, 1), InvalidParams);
    CHECK_THROWS_AS(gen_front_end(32, 32, 4, 4, 5, 1), InvalidParams);
}

TEST_CASE("effective_gains") {
    SUBCASE("zero channel") {
        const FrontEnd fe = gen_front_end(8, 8, 2, 3, 2, 4);
        ChannelRealization ch;
        ch.matrix = CMatrix::Zero(8, 8);
        CHECK(effective_gains(fe, ch).norm() == 0.0);
    }
    SUBCASE("identity whitener") {
        // W = I, F q = e_1 and H with first column (1+j, 0, 0).
        const FrontEnd fe = FrontEnd::from_matrices(CMatrix::Identity(3, 1), CMatrix::Identity(3, 3),
                                                    CVector::Ones(1));
        ChannelRealization ch;
        ch.matrix = CMatrix::Zero(3, 3);
        ch.matrix(0, 0) = cplx(1.0, 1.0);
        const CVector g = effective_gains(fe, ch);
        CHECK(std::abs(g(0) - cplx(1.0, 1.0)) < 1e-15);
        const SyncParams p = SyncParams::from_gains(g, 0.0, 1.0);
        CHECK(p.amplitudes[0] == doctest::Approx(std::sqrt(2.0)));
        CHECK(p.phases[0] == doctest::Approx(kPi / 4));
    }
    SUBCASE("matches naive matrix chain") {
        ChannelConfig cfg;
        cfg.rays_per_cluster = {10, 10, 10, 10};
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            cfg.seed = seed;
            const auto ch = gen_channel(cfg);
            const FrontEnd fe = gen_front_end(32, 32, 4, 4, 4, seed + 100);
            const CVector g = effective_gains(fe, ch);
            const auto ref = oracle::naive_effective_gains(fe, ch.matrix);
            double err = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < ref.size(); ++i) {
                err += std::norm(g(static_cast<Eigen::Index>(i)) - ref[i]);
                scale += std::norm(ref[i]);
            }
            CHECK(std::sqrt(err / scale) < 1e-12);
        }
    }
    SUBCASE("dimension mismatch") {
        const FrontEnd fe = gen_front_end(8, 8, 2, 2, 2, 1);
        ChannelRealization ch;
        ch.matrix = CMatrix::Zero(8, 4);
        CHECK_THROWS_AS(effective_gains(fe, ch), DimensionMismatch);
    }
}

TEST_CASE("gen_training") {
    const TrainingBlock t = gen_training(64, 3);
    CHECK(t.size() == 64);
    for (std::size_t n = 0; n < t.size(); ++n) {
        CHECK(std::abs(std::abs(t[n]) - 1.0) < 1e-15);
        const double k = (std::arg(t[n]) - kPi / 4) / (kPi / 2);
        CHECK(std::abs(k - std::round(k)) < 1e-12);
    }
    const TrainingBlock again = gen_training(64, 3);
    CHECK(std::equal(t.symbols().begin(), t.symbols().end(), again.symbols().begin()));
    CHECK_THROWS_AS(gen_training(1, 3), InvalidParams);
    CHECK_THROWS_AS(TrainingBlock({cplx(1.0, 0.0), cplx(0.5, 0.0)}), InvalidParams);
}

TEST_CASE("SyncParams validation") {
    SyncParams p{{1.0, 0.5}, {0.0, 1.0}, 0.1, 1.0};
    CHECK_NOTHROW(p.validate());
    CHECK(p.trace_p() == doctest::Approx(1.25));
    CHECK(p.average_snr() == doctest::Approx(0.625));
    auto bad = p;
    bad.amplitudes[1] = -0.1;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = p;
    bad.cfo = 0.5;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = p;
    bad.noise_var = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = p;
    bad.phases.pop_back();
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
}

TEST_CASE("synthesize") {
    SUBCASE("noiseless identity") {
        const TrainingBlock t(std::vector<cplx>(8, cplx(1.0, 0.0)));
        const SyncParams p{{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, 0.0, 0.0};
        const ReceivedBlock r = synthesize(p, t, 5);
        for (std::size_t n = 0; n < 8; ++n) {
            CHECK(r.samples(0, static_cast<Eigen::Index>(n)) == cplx(1.0, 0.0));
            CHECK(r.samples(1, static_cast<Eigen::Index>(n)) == cplx(0.0, 0.0));
            CHECK(r.samples(2, static_cast<Eigen::Index>(n)) == cplx(0.0, 0.0));
        }
    }
    SUBCASE("quarter cycle rotation") {
        const TrainingBlock t(std::vector<cplx>(4, cplx(1.0, 0.0)));
        const SyncParams p{{1.0}, {0.0}, 0.25, 0.0};
        const ReceivedBlock r = synthesize(p, t, 5);
        const cplx expected[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        for (Eigen::Index n = 0; n < 4; ++n) CHECK(std::abs(r.samples(0, n) - expected[n]) < 1e-15);
    }
    SUBCASE("noiseless blocks follow the model exactly") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            SyncParams p{{u(rng), u(rng)}, {kTwoPi * u(rng), kTwoPi * u(rng)}, u(rng) - 0.5, 0.0};
            const TrainingBlock t = gen_training(32, static_cast<std::uint64_t>(trial));
            const ReceivedBlock r = synthesize(p, t, 1);
            const auto xi = oracle::pack(p);
            const auto mu = oracle::mean_vector(xi, 2, {t.symbols().begin(), t.symbols().end()});
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t n = 0; n < 32; ++n) CHECK(std::abs(r.chain(i)[n] - mu[i * 32 + n]) < 1e-12);
        }
    }
    SUBCASE("noise power") {
        const SyncParams p{{0.3, 0.7, 0.1, 0.9}, {1.0, 2.0, 3.0, 4.0}, 0.05, 1.0};
        const TrainingBlock t = gen_training(64, 1);
        const CRowMatrix mean = noiseless_mean(p, t);
        double total = 0.0, real_part = 0.0;
        const int trials = 10000;
        for (int k = 0; k < trials; ++k) {
            const ReceivedBlock r = synthesize(p, t, static_cast<std::uint64_t>(k));
            const CRowMatrix w = r.samples - mean;
            total += w.squaredNorm() / (64.0 * 4.0);
            real_part += w.real().squaredNorm() / (64.0 * 4.0);
        }
        CHECK(std::abs(total / trials - 1.0) < 0.02);
        CHECK(std::abs(real_part / trials - 0.5) < 0.01);
    }
    SUBCASE("deterministic per seed") {
        const SyncParams p{{0.5, 0.5}, {1.0, 2.0}, 0.1, 0.3};
        const TrainingBlock t = gen_training(16, 1);
        CHECK(synthesize(p, t, 42).samples == synthesize(p, t, 42).samples);
        CHECK(synthesize(p, t, 42).samples != synthesize(p, t, 43).samples);
    }
}
