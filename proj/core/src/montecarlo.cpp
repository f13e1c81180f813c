#include "mmsync/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mmsync/angles.hpp"
#include "mmsync/crlb.hpp"
#include "mmsync/errors.hpp"
#include "mmsync/fft.hpp"

namespace mmsync {

namespace {

struct TrialRecord {
    bool ok = false;
    std::size_t redraws = 0;
    std::vector<double> error;
    std::vector<double> truth;
    std::vector<double> bound;
};

// Trial seeds depend on the trial index only, so every SNR point sees the
// same parameters, training and noise shape (common random numbers).
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

SyncParams draw_params(const McConfig& cfg, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    std::uniform_real_distribution<double> cfo(-0.5, 0.5);

    if (cfg.gain_model == GainModel::channel) {
        ChannelConfig ch_cfg;
        ch_cfg.n_tx = cfg.n_tx;
        ch_cfg.n_rx = cfg.n_rx;
        ch_cfg.rays_per_cluster = cfg.rays_per_cluster;
        ch_cfg.path_loss = cfg.path_loss;
        ch_cfg.seed = rng();
        const ChannelRealization ch = gen_channel(ch_cfg);
        for (;;) {
            try {
                const FrontEnd fe = gen_front_end(cfg.n_tx, cfg.n_rx, cfg.l_t, cfg.l_r, cfg.l_t, rng());
                SyncParams p = SyncParams::from_gains(effective_gains(fe, ch), cfo(rng), 1.0);
                return p;
            } catch (const CholeskyFailure&) {
                // regenerate the front end with the next seed
            }
        }
    }

    SyncParams p;
    for (std::size_t i = 0; i < cfg.l_r; ++i) p.amplitudes.push_back(unit(rng));
    for (std::size_t i = 0; i < cfg.l_r; ++i) p.phases.push_back(phase(rng));
    p.cfo = cfo(rng);
    p.noise_var = 1.0;
    return p;
}

bool has_zero_truth(const SyncParams& p) {
    if (p.cfo == 0.0) return true;
    for (std::size_t i = 0; i < p.chains(); ++i)
        if (p.amplitudes[i] == 0.0 || p.phases[i] == 0.0) return true;
    return false;
}

std::vector<double> true_values(const SyncParams& p) {
    std::vector<double> v;
    const std::size_t chains = p.chains();
    v.reserve(3 * chains + 3);
    for (double a : p.amplitudes) v.push_back(a);
    for (double b : p.phases) v.push_back(b);
    v.push_back(p.cfo);
    v.push_back(p.noise_var);
    for (double g : p.chain_snr()) v.push_back(g);
    v.push_back(p.average_snr());
    return v;
}

std::vector<double> bound_values(const CrlbReport& c) {
    std::vector<double> v;
    v.insert(v.end(), c.var_alpha.begin(), c.var_alpha.end());
    v.insert(v.end(), c.var_beta.begin(), c.var_beta.end());
    v.push_back(c.var_cfo);
    v.push_back(c.var_noise_var);
    v.insert(v.end(), c.var_gamma.begin(), c.var_gamma.end());
    v.push_back(c.var_snr);
    return v;
}

TrialRecord run_trial(const McConfig& cfg, const SyncParams* fixed, double snr_db, std::size_t trial) {
    TrialRecord rec;
    std::mt19937_64 rng(trial_seed(cfg.seed, trial));

    SyncParams truth;
    if (fixed != nullptr) {
        truth = *fixed;
    } else {
        truth = draw_params(cfg, rng);
        while (has_zero_truth(truth)) {
            ++rec.redraws;
            truth = draw_params(cfg, rng);
        }
    }
    const TrainingBlock t = gen_training(cfg.n, rng());
    const std::uint64_t noise_seed = rng();

    const double snr_linear = std::pow(10.0, snr_db / 10.0);
    truth.noise_var = truth.trace_p() / (static_cast<double>(truth.chains()) * snr_linear);

    try {
        const ReceivedBlock r = synthesize(truth, t, noise_seed);
        const EstimateReport est = estimate_all(r, t, cfg.effective_fft_size());
        if (est.noiseless) return rec;
        const CrlbReport bound = crlb_numeric(truth, cfg.n);
        rec.error = wrapped_error(truth, est);
        rec.truth = true_values(truth);
        rec.bound = bound_values(bound);
        rec.ok = std::all_of(rec.error.begin(), rec.error.end(), [](double e) { return std::isfinite(e); });
    } catch (const Error&) {
        rec.ok = false;
    }
    return rec;
}

McCell aggregate(const std::vector<TrialRecord>& records, std::size_t p) {
    McCell cell;
    double sum_e = 0.0, sum_e2 = 0.0, sum_eff = 0.0, sum_eff2 = 0.0, sum_c = 0.0, sum_t2 = 0.0;
    std::size_t count = 0;
    for (const auto& rec : records) {
        if (!rec.ok) continue;
        const double e = rec.error[p];
        const double c = rec.bound[p];
        const double eff = e * e / c;
        sum_e += e;
        sum_e2 += e * e;
        sum_eff += eff;
        sum_eff2 += eff * eff;
        sum_c += c;
        sum_t2 += rec.truth[p] * rec.truth[p];
        ++count;
    }
    cell.n_trials_effective = count;
    if (count == 0) return cell;

    const double n = static_cast<double>(count);
    const double mean_t2 = sum_t2 / n;
    const double mean_e = sum_e / n;
    const double var_e = count > 1 ? std::max(0.0, (sum_e2 - n * mean_e * mean_e) / (n - 1.0)) : 0.0;
    const double mean_eff = sum_eff / n;
    const double var_eff = count > 1 ? std::max(0.0, (sum_eff2 - n * mean_eff * mean_eff) / (n - 1.0)) : 0.0;

    cell.normalized_bias = mean_e / std::sqrt(mean_t2);
    cell.bias_std_error = std::sqrt(var_e / n / mean_t2);
    cell.normalized_crlb = sum_c / n / mean_t2;
    cell.efficiency = mean_eff;
    cell.efficiency_std_error = std::sqrt(var_eff / n);
    cell.normalized_variance = mean_eff * cell.normalized_crlb;
    return cell;
}

std::string format_number(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

}  // namespace

std::vector<double> McConfig::default_snr_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(-15.0 + 2.5 * k);
    return grid;
}

void McConfig::validate() const {
    if (snr_grid_db.empty()) throw InvalidParams("SNR grid is empty");
    if (n_trials < 1) throw InvalidParams("need at least one trial");
    if (n < 2) throw InvalidParams("training length must be at least 2");
    if (l_r < 1 || l_t < 1) throw InvalidParams("RF chain counts must be at least 1");
    if (gain_model == GainModel::channel && (l_r > n_rx || l_t > n_tx))
        throw InvalidParams("RF chains cannot exceed antenna counts");
    const std::size_t k = effective_fft_size();
    if (k < n || !is_power_of_two(k)) throw InvalidParams("FFT size must be a power of two >= N");
    if (!redraw_params_per_trial && !fixed_amplitudes.empty()) {
        if (fixed_amplitudes.size() != l_r || fixed_phases.size() != l_r)
            throw InvalidParams("fixed amplitudes and phases need one entry per RF chain");
    }
}

std::vector<std::string> report_parameters(std::size_t chains) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= chains; ++i) names.push_back("alpha_" + std::to_string(i));
    for (std::size_t i = 1; i <= chains; ++i) names.push_back("beta_" + std::to_string(i));
    names.emplace_back("cfo");
    names.emplace_back("noise_var");
    for (std::size_t i = 1; i <= chains; ++i) names.push_back("gamma_" + std::to_string(i));
    names.emplace_back("snr");
    return names;
}

std::vector<double> wrapped_error(const SyncParams& truth, const EstimateReport& est) {
    const std::size_t chains = truth.chains();
    if (est.alpha_hat.size() != chains || est.beta_hat.size() != chains || est.gamma_hat.size() != chains)
        throw DimensionMismatch("estimate and truth have different chain counts");
    const std::vector<double> t = true_values(truth);
    std::vector<double> e;
    e.reserve(t.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < chains; ++i) e.push_back(est.alpha_hat[i] - t[k++]);
    for (std::size_t i = 0; i < chains; ++i) e.push_back(wrap_pi(est.beta_hat[i] - t[k++]));
    e.push_back(wrap_cycle(est.cfo_hat - t[k++]));
    e.push_back(est.noise_var_hat - t[k++]);
    for (std::size_t i = 0; i < chains; ++i) e.push_back(est.gamma_hat[i] - t[k++]);
    e.push_back(est.snr_hat - t[k]);
    return e;
}

std::vector<double> normalized_error(const SyncParams& truth, const EstimateReport& est) {
    std::vector<double> e = wrapped_error(truth, est);
    const std::vector<double> t = true_values(truth);
    const auto names = report_parameters(truth.chains());
    for (std::size_t k = 0; k < e.size(); ++k) {
        if (t[k] == 0.0) throw ZeroTruth("true " + names[k] + " is zero; cannot normalize");
        e[k] /= t[k];
    }
    return e;
}

const McCell& McReport::cell(std::size_t snr_index, const std::string& parameter) const {
    const auto it = std::find(parameters.begin(), parameters.end(), parameter);
    if (it == parameters.end()) throw InvalidParams("unknown report parameter " + parameter);
    return cell(snr_index, static_cast<std::size_t>(it - parameters.begin()));
}

McReport run_campaign(const McConfig& cfg) {
    cfg.validate();

    std::optional<SyncParams> fixed;
    if (!cfg.redraw_params_per_trial) {
        SyncParams p;
        if (!cfg.fixed_amplitudes.empty()) {
            p.amplitudes = cfg.fixed_amplitudes;
            p.phases = cfg.fixed_phases;
            p.cfo = cfg.fixed_cfo;
            p.noise_var = 1.0;
            p.validate();
            if (has_zero_truth(p)) throw ZeroTruth("fixed parameters contain a zero value");
        } else {
            std::mt19937_64 rng(cfg.seed);
            do {
                p = draw_params(cfg, rng);
            } while (has_zero_truth(p));
        }
        fixed = p;
    }

    const std::size_t points = cfg.snr_grid_db.size();
    const std::size_t trials = cfg.n_trials;
    std::vector<std::vector<TrialRecord>> records(points, std::vector<TrialRecord>(trials));

    std::size_t workers = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, points * trials);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t job = next++; job < points * trials; job = next++) {
            const std::size_t s = job / trials;
            const std::size_t k = job % trials;
            records[s][k] = run_trial(cfg, fixed ? &*fixed : nullptr, cfg.snr_grid_db[s], k);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    McReport report;
    report.config = cfg;
    report.parameters = report_parameters(cfg.l_r);
    for (std::size_t s = 0; s < points; ++s) {
        std::size_t failed = 0, redrawn = 0;
        for (const auto& rec : records[s]) {
            failed += rec.ok ? 0 : 1;
            redrawn += rec.redraws;
        }
        report.failed_trials.push_back(failed);
        report.redrawn_trials.push_back(redrawn);
        for (std::size_t p = 0; p < report.parameters.size(); ++p) {
            McCell cell = aggregate(records[s], p);
            cell.snr_db = cfg.snr_grid_db[s];
            cell.parameter = report.parameters[p];
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

void write_report_csv(const McReport& report, std::ostream& out) {
    out << "snr_db,parameter,normalized_bias,normalized_variance,normalized_crlb,n_trials_effective\n";
    for (const auto& c : report.cells) {
        out << format_number(c.snr_db) << ',' << c.parameter << ',' << format_number(c.normalized_bias) << ','
            << format_number(c.normalized_variance) << ',' << format_number(c.normalized_crlb) << ','
            << c.n_trials_effective << '\n';
    }
}

std::string report_metadata_json(const McReport& report) {
    const McConfig& cfg = report.config;
    nlohmann::ordered_json j;
    j["config"] = {
        {"snr_grid_db", cfg.snr_grid_db},
        {"n_trials", cfg.n_trials},
        {"n", cfg.n},
        {"l_r", cfg.l_r},
        {"l_t", cfg.l_t},
        {"n_tx", cfg.n_tx},
        {"n_rx", cfg.n_rx},
        {"fft_size", cfg.effective_fft_size()},
        {"seed", cfg.seed},
        {"redraw_params_per_trial", cfg.redraw_params_per_trial},
        {"gain_model", cfg.gain_model == GainModel::channel ? "channel" : "uniform"},
        {"rays_per_cluster", cfg.rays_per_cluster},
        {"path_loss", cfg.path_loss},
    };
    if (!cfg.redraw_params_per_trial && !cfg.fixed_amplitudes.empty()) {
        j["config"]["fixed_amplitudes"] = cfg.fixed_amplitudes;
        j["config"]["fixed_phases"] = cfg.fixed_phases;
        j["config"]["fixed_cfo"] = cfg.fixed_cfo;
    }
    j["parameters"] = report.parameters;
    j["aggregation"] = {
        {"error", "estimate minus truth; beta wrapped to (-pi, pi], cfo wrapped to [-1/2, 1/2)"},
        {"normalized_bias", "mean(error) / sqrt(mean(truth^2))"},
        {"normalized_crlb", "mean over trials of the numeric CRLB, divided by mean(truth^2)"},
        {"normalized_variance", "mean(error^2 / crlb) * normalized_crlb (mean squared error about the truth)"},
        {"noise_variance", "set per trial so that trace(P) / (L_r sigma^2) equals the grid SNR"},
        {"trial_seeds", "derived from (seed, trial index); shared across SNR points"},
    };
    j["failed_trials"] = report.failed_trials;
    j["redrawn_trials"] = report.redrawn_trials;
    return j.dump(2) + "\n";
}

}  // namespace mmsync
