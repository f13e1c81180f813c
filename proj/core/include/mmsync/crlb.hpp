#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmsync/signal_model.hpp"

namespace mmsync {

/// Position of each unknown in the Fisher matrix:
/// (alpha_1..alpha_L, sigma^2, df, beta_1..beta_L). The first L+1 entries
/// form F1, the remaining L+1 form F2.
struct ParamLayout {
    std::size_t chains;

    std::size_t alpha(std::size_t i) const noexcept { return i; }
    std::size_t noise_var() const noexcept { return chains; }
    std::size_t cfo() const noexcept { return chains + 1; }
    std::size_t beta(std::size_t i) const noexcept { return chains + 2 + i; }
    std::size_t dim() const noexcept { return 2 * chains + 2; }

    /// "alpha_1", "noise_var", "cfo", "beta_1", ...
    std::string name(std::size_t index) const;
};

struct FisherMatrix {
    std::size_t chains = 0;
    Eigen::MatrixXd matrix;

    ParamLayout layout() const noexcept { return {chains}; }
    Eigen::MatrixXd block_f1() const;
    Eigen::MatrixXd block_f2() const;
};

struct CrlbReport {
    std::vector<double> var_alpha;
    double var_noise_var = 0.0;
    double var_cfo = 0.0;
    std::vector<double> var_beta;
    /// g' F^{-1} g' for gamma_i = alpha_i^2 / sigma^2.
    std::vector<double> var_gamma;
    /// The printed closed form 4 gamma_i / N + gamma_i^2 / N.
    std::vector<double> var_gamma_closed;
    double var_snr = 0.0;
};

/// Where the CFO and phase bounds come from.
enum class CfoPhaseBound {
    inverse_fim,  // numeric inverse of F2 (authoritative)
    printed,      // literal transcription of the published closed forms
};

/// Closed-form FIM; throws InvalidParams when sigma^2 <= 0 or n < 2.
FisherMatrix fim(const SyncParams& params, std::size_t n);

/// sigma^2 / (2N), identical for every chain.
double crlb_closed_alpha(const SyncParams& params, std::size_t n);

/// sigma^4 / (L_r N).
double crlb_closed_noise_var(const SyncParams& params, std::size_t n);

/// 4 gamma / N + gamma^2 / N.
double crlb_closed_gamma(double gamma, std::size_t n);

/// 2 SNR / (L_r N) + SNR^2 / (L_r N).
double crlb_closed_snr(double snr, std::size_t chains, std::size_t n);

/// Published closed form for var{df}. Kept for comparison only: it does not
/// agree with the inverse of F2.
double crlb_printed_cfo(const SyncParams& params, std::size_t n);

/// Published closed form for var{beta_i}; see crlb_printed_cfo.
std::vector<double> crlb_printed_beta(const SyncParams& params, std::size_t n);

/// Inverts the block-diagonal FIM. Throws SingularFim (with the chain index)
/// when an amplitude is zero or F2 is not positive definite.
Eigen::MatrixXd fim_inverse(const FisherMatrix& f);

CrlbReport crlb_numeric(const SyncParams& params, std::size_t n,
                        CfoPhaseBound source = CfoPhaseBound::inverse_fim);

/// g^T F^{-1} g for a scalar function with gradient g in FIM order.
double transformed_bound(const Eigen::MatrixXd& fim_inv, const Eigen::VectorXd& gradient);

/// Gradient of the log-likelihood at `params`, in FIM order.
Eigen::VectorXd score(const SyncParams& params, const TrainingBlock& t, const ReceivedBlock& r);

struct ScoreStatistic {
    std::string name;
    double mean = 0.0;
    double std_error = 0.0;
    double variance = 0.0;
    /// Matching diagonal entry of the FIM (the expected score variance).
    double fisher = 0.0;

    bool within(double sigmas) const noexcept;
};

struct RegularityResult {
    std::size_t trials = 0;
    std::vector<ScoreStatistic> scores;

    bool passes(double sigmas = 4.0) const noexcept;
};

/// Monte Carlo mean of the score over blocks synthesized at `params`.
RegularityResult regularity_check(const SyncParams& params, const TrainingBlock& t,
                                  std::size_t n_trials, std::uint64_t seed);

}  // namespace mmsync
