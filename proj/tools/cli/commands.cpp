#include "cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "cli/figures.hpp"
#include "mmsync/config.hpp"
#include "mmsync/crlb.hpp"
#include "mmsync/csv.hpp"
#include "mmsync/errors.hpp"
#include "mmsync/estimators.hpp"
#include "mmsync/montecarlo.hpp"
#include "mmsync/signal_model.hpp"

namespace fs = std::filesystem;

namespace mmsync::cli {

namespace {

// Every key any command understands. One config file may be shared between
// commands, so each command accepts the union and ignores what it does not use.
const std::vector<std::string_view> kKnownKeys = {
    "snr_grid_db", "snr_min_db", "snr_max_db", "snr_step_db", "n_trials", "n", "l_r", "l_t",
    "n_tx", "n_rx", "fft_size", "seed", "redraw_params_per_trial", "gain_model",
    "rays_per_cluster", "path_loss", "amplitudes", "phases", "cfo", "noise_var", "threads",
    "plot", "training_seed", "samples_csv", "training_csv",
};

KeyValueConfig load_config(const RunSpec& spec) {
    KeyValueConfig cfg = spec.config_path ? KeyValueConfig::load(*spec.config_path)
                                          : KeyValueConfig::parse("", "<defaults>");
    const auto unknown = cfg.unknown_keys(kKnownKeys);
    if (!unknown.empty()) throw ConfigError(cfg.source() + ": unknown key '" + unknown.front() + "'");
    return cfg;
}

// Paths inside a config file are relative to the file itself.
fs::path resolve_path(const RunSpec& spec, const std::string& value) {
    fs::path p(value);
    if (p.is_relative() && spec.config_path) p = spec.config_path->parent_path() / p;
    return p;
}

void prepare_output_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw ConfigError("cannot create output directory '" + dir.string() + "'");
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

std::size_t fft_size_of(const RunSpec& spec, const KeyValueConfig& cfg) {
    return spec.fft_size ? *spec.fft_size : cfg.get_size("fft_size", 0);
}

std::uint64_t seed_of(const RunSpec& spec, const KeyValueConfig& cfg, std::uint64_t fallback) {
    return spec.seed ? *spec.seed : cfg.get_u64("seed", fallback);
}

SyncParams scenario_params(const KeyValueConfig& cfg) {
    SyncParams p;
    p.amplitudes = cfg.get_doubles("amplitudes", {1.0, 1.0, 1.0, 1.0});
    p.phases = cfg.get_doubles("phases", std::vector<double>(p.amplitudes.size(), 0.0));
    p.cfo = cfg.get_double("cfo", 0.0);
    p.noise_var = cfg.get_double("noise_var", 1.0);
    p.validate();
    return p;
}

double to_db(double x) { return 10.0 * std::log10(x); }

std::string fmt(double x, int precision = 6) {
    std::ostringstream s;
    s << std::setprecision(precision) << x;
    return s.str();
}

std::string indexed(std::string_view name, std::size_t i) {
    return std::string(name) + "_" + std::to_string(i + 1);
}

McConfig campaign_config(const RunSpec& spec, const KeyValueConfig& cfg) {
    McConfig mc;
    if (cfg.has("snr_grid_db")) {
        mc.snr_grid_db = cfg.get_doubles("snr_grid_db", {});
    } else if (cfg.has("snr_min_db") || cfg.has("snr_max_db") || cfg.has("snr_step_db")) {
        const double lo = cfg.get_double("snr_min_db", -15.0);
        const double hi = cfg.get_double("snr_max_db", 10.0);
        const double step = cfg.get_double("snr_step_db", 2.5);
        if (!(step > 0.0) || hi < lo) throw ConfigError(cfg.source() + ": SNR range is empty");
        mc.snr_grid_db.clear();
        const auto points = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (std::size_t k = 0; k < points; ++k) mc.snr_grid_db.push_back(lo + step * static_cast<double>(k));
    }
    mc.n_trials = spec.trials ? *spec.trials : cfg.get_size("n_trials", mc.n_trials);
    mc.n = cfg.get_size("n", mc.n);
    mc.l_r = cfg.get_size("l_r", mc.l_r);
    mc.l_t = cfg.get_size("l_t", mc.l_t);
    mc.n_tx = cfg.get_size("n_tx", mc.n_tx);
    mc.n_rx = cfg.get_size("n_rx", mc.n_rx);
    mc.fft_size = fft_size_of(spec, cfg);
    mc.seed = seed_of(spec, cfg, mc.seed);
    mc.redraw_params_per_trial = cfg.get_bool("redraw_params_per_trial", mc.redraw_params_per_trial);
    const std::string model = cfg.get_string("gain_model", "uniform");
    if (model == "uniform") {
        mc.gain_model = GainModel::uniform;
    } else if (model == "channel") {
        mc.gain_model = GainModel::channel;
    } else {
        throw ConfigError(cfg.source() + ": gain_model must be 'uniform' or 'channel', got '" + model + "'");
    }
    mc.rays_per_cluster = cfg.get_sizes("rays_per_cluster", mc.rays_per_cluster);
    mc.path_loss = cfg.get_double("path_loss", mc.path_loss);
    mc.fixed_amplitudes = cfg.get_doubles("amplitudes", {});
    mc.fixed_phases = cfg.get_doubles("phases", {});
    mc.fixed_cfo = cfg.get_double("cfo", 0.0);
    mc.threads = cfg.get_size("threads", 0);
    mc.validate();
    return mc;
}

void print_campaign_summary(const McReport& report, std::ostream& out) {
    out << "parameters: " << report.parameters.size() << ", SNR points: " << report.config.snr_grid_db.size()
        << ", trials per point: " << report.config.n_trials << "\n";
    out << std::left << std::setw(10) << "snr_db" << std::setw(12) << "parameter" << std::right
        << std::setw(14) << "norm_bias" << std::setw(14) << "norm_var" << std::setw(14) << "ncrlb"
        << std::setw(12) << "efficiency" << "\n";
    for (const auto& c : report.cells) {
        out << std::left << std::setw(10) << fmt(c.snr_db, 4) << std::setw(12) << c.parameter << std::right
            << std::setw(14) << fmt(c.normalized_bias, 4) << std::setw(14) << fmt(c.normalized_variance, 4)
            << std::setw(14) << fmt(c.normalized_crlb, 4) << std::setw(12) << fmt(c.efficiency, 4) << "\n";
    }
    std::size_t failed = 0, redrawn = 0;
    for (auto f : report.failed_trials) failed += f;
    for (auto r : report.redrawn_trials) redrawn += r;
    out << "failed trials: " << failed << ", redrawn trials: " << redrawn << "\n";
}

}  // namespace

int cmd_campaign(const RunSpec& spec, std::ostream& out, std::ostream&) {
    const KeyValueConfig cfg = load_config(spec);
    const McConfig mc = campaign_config(spec, cfg);
    const bool plot = spec.plot || cfg.get_bool("plot", false);
    prepare_output_dir(spec.output_dir);

    const McReport report = run_campaign(mc);

    const fs::path csv_path = spec.output_dir / "mc_report.csv";
    const fs::path meta_path = spec.output_dir / "metadata.json";
    {
        auto csv = open_output(csv_path);
        write_report_csv(report, csv);
        auto meta = open_output(meta_path);
        meta << report_metadata_json(report) << "\n";
    }
    print_campaign_summary(report, out);
    out << "wrote " << csv_path.string() << "\n" << "wrote " << meta_path.string() << "\n";
    if (plot)
        for (const auto& p : write_campaign_figures(report, spec.output_dir)) out << "wrote " << p.string() << "\n";
    return kSuccess;
}

int cmd_estimate(const RunSpec& spec, std::ostream& out, std::ostream&) {
    const KeyValueConfig cfg = load_config(spec);
    prepare_output_dir(spec.output_dir);

    const std::uint64_t training_seed = cfg.get_u64("training_seed", 7);
    ReceivedBlock block;
    std::optional<TrainingBlock> training;
    std::optional<SyncParams> truth;

    if (cfg.has("samples_csv")) {
        const fs::path samples_path = resolve_path(spec, cfg.get_string("samples_csv", ""));
        std::ifstream in(samples_path);
        if (!in) throw ConfigError("cannot open samples file '" + samples_path.string() + "'");
        try {
            block = read_block_csv(in);
        } catch (const CsvError& e) {
            throw CsvError(e.row(), e.column(), samples_path.string() + ": " + e.what());
        }
        if (cfg.has("training_csv")) {
            const fs::path training_path = resolve_path(spec, cfg.get_string("training_csv", ""));
            std::ifstream tin(training_path);
            if (!tin) throw ConfigError("cannot open training file '" + training_path.string() + "'");
            try {
                training.emplace(read_training_csv(tin));
            } catch (const CsvError& e) {
                throw CsvError(e.row(), e.column(), training_path.string() + ": " + e.what());
            }
        } else {
            training.emplace(gen_training(block.length(), training_seed));
        }
    } else {
        truth = scenario_params(cfg);
        const std::size_t n = cfg.get_size("n", 64);
        training.emplace(gen_training(n, training_seed));
        block = synthesize(*truth, *training, seed_of(spec, cfg, 1));
        auto block_out = open_output(spec.output_dir / "received.csv");
        write_block_csv(block, block_out);
        auto training_out = open_output(spec.output_dir / "training.csv");
        write_training_csv(*training, training_out);
    }

    const EstimateReport est = estimate_all(block, *training, fft_size_of(spec, cfg));

    out << "chains: " << block.chains() << ", N: " << block.length() << ", FFT size: " << est.fft_size
        << ", peak bin: " << est.peak_bin << ", offset: " << fmt(est.peak_offset) << "\n";
    out << std::left << std::setw(12) << "parameter" << std::right << std::setw(16) << "estimate";
    if (truth) out << std::setw(16) << "true";
    out << "\n";
    auto row = [&](const std::string& name, double value, std::optional<double> truth_value) {
        out << std::left << std::setw(12) << name << std::right << std::setw(16) << fmt(value, 8);
        if (truth_value) out << std::setw(16) << fmt(*truth_value, 8);
        out << "\n";
    };
    auto truth_of = [&](auto&& get) -> std::optional<double> {
        if (truth) return get(*truth);
        return std::nullopt;
    };
    row("cfo", est.cfo_hat, truth_of([](const SyncParams& p) { return p.cfo; }));
    for (std::size_t i = 0; i < block.chains(); ++i)
        row(indexed("alpha", i), est.alpha_hat[i], truth_of([i](const SyncParams& p) { return p.amplitudes[i]; }));
    for (std::size_t i = 0; i < block.chains(); ++i)
        row(indexed("beta", i), est.beta_hat[i], truth_of([i](const SyncParams& p) { return p.phases[i]; }));
    row("noise_var", est.noise_var_hat, truth_of([](const SyncParams& p) { return p.noise_var; }));
    for (std::size_t i = 0; i < block.chains(); ++i)
        row(indexed("gamma", i), est.gamma_hat[i], truth_of([i](const SyncParams& p) { return p.chain_snr()[i]; }));
    row("snr", est.snr_hat, truth_of([](const SyncParams& p) { return p.average_snr(); }));
    if (est.noiseless) out << "note: zero residual, SNR estimates are infinite\n";

    const fs::path csv_path = spec.output_dir / "estimate.csv";
    auto csv = open_output(csv_path);
    write_estimate_csv(est, csv);
    out << "wrote " << csv_path.string() << "\n";
    return kSuccess;
}

int cmd_crlb(const RunSpec& spec, std::ostream& out, std::ostream&) {
    const KeyValueConfig cfg = load_config(spec);
    const SyncParams p = scenario_params(cfg);
    const std::size_t n = cfg.get_size("n", 64);
    prepare_output_dir(spec.output_dir);

    const CrlbReport numeric = crlb_numeric(p, n);
    const double printed_cfo = crlb_printed_cfo(p, n);
    const auto printed_beta = crlb_printed_beta(p, n);
    const auto gamma = p.chain_snr();

    out << "chains: " << p.chains() << ", N: " << n << ", average SNR: " << fmt(to_db(p.average_snr()), 5)
        << " dB\n";
    out << std::left << std::setw(12) << "parameter" << std::right << std::setw(18) << "closed form"
        << std::setw(18) << "inverse FIM" << "\n";
    auto row = [&](const std::string& name, double closed, double inverse) {
        out << std::left << std::setw(12) << name << std::right << std::setw(18) << fmt(closed, 8)
            << std::setw(18) << fmt(inverse, 8) << "\n";
    };
    for (std::size_t i = 0; i < p.chains(); ++i)
        row(indexed("alpha", i), crlb_closed_alpha(p, n), numeric.var_alpha[i]);
    row("noise_var", crlb_closed_noise_var(p, n), numeric.var_noise_var);
    row("cfo", printed_cfo, numeric.var_cfo);
    for (std::size_t i = 0; i < p.chains(); ++i) row(indexed("beta", i), printed_beta[i], numeric.var_beta[i]);
    for (std::size_t i = 0; i < p.chains(); ++i)
        row(indexed("gamma", i), crlb_closed_gamma(gamma[i], n), numeric.var_gamma[i]);
    row("snr", crlb_closed_snr(p.average_snr(), p.chains(), n), numeric.var_snr);
    out << "closed forms for cfo, beta and gamma are the published expressions; the inverse-FIM column is "
           "authoritative\n";

    const fs::path csv_path = spec.output_dir / "crlb.csv";
    auto csv = open_output(csv_path);
    write_crlb_csv(numeric, to_db(p.average_snr()), csv);
    out << "wrote " << csv_path.string() << "\n";
    return kSuccess;
}

int cmd_regularity(const RunSpec& spec, std::ostream& out, std::ostream&) {
    const KeyValueConfig cfg = load_config(spec);
    const SyncParams p = scenario_params(cfg);
    if (!(p.noise_var > 0.0)) throw InvalidParams("regularity check needs noise_var > 0");
    const std::size_t n = cfg.get_size("n", 64);
    const std::size_t trials = spec.trials ? *spec.trials : cfg.get_size("n_trials", 10000);
    const TrainingBlock t = gen_training(n, cfg.get_u64("training_seed", 7));

    const RegularityResult result = regularity_check(p, t, trials, seed_of(spec, cfg, 1));

    constexpr double kSigmas = 4.0;
    out << "trials: " << result.trials << ", threshold: " << kSigmas << " standard errors\n";
    out << std::left << std::setw(12) << "score" << std::right << std::setw(16) << "mean" << std::setw(16)
        << "std error" << std::setw(16) << "variance" << std::setw(16) << "fisher" << std::setw(8) << ""
        << "\n";
    for (const auto& s : result.scores) {
        out << std::left << std::setw(12) << s.name << std::right << std::setw(16) << fmt(s.mean)
            << std::setw(16) << fmt(s.std_error) << std::setw(16) << fmt(s.variance) << std::setw(16)
            << fmt(s.fisher) << std::setw(8) << (s.within(kSigmas) ? "PASS" : "FAIL") << "\n";
    }
    out << (result.passes(kSigmas) ? "regularity: PASS" : "regularity: FAIL") << "\n";
    return kSuccess;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Synchronization parameter estimation and Cramer-Rao bounds for hybrid mmWave receivers",
                 "mmsync"};
    RunSpec spec;
    std::string command;
    std::string config;
    std::string output_dir = ".";
    std::size_t trials = 0, fft_size = 0;
    std::uint64_t seed = 0;

    app.add_option("command", command, "campaign | estimate | crlb | regularity")
        ->required()
        ->check(CLI::IsMember({"campaign", "estimate", "crlb", "regularity"}));
    auto* config_opt = app.add_option("--config", config, "key = value configuration file");
    app.add_option("--out", output_dir, "output directory (created if missing)");
    auto* trials_opt = app.add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    auto* fft_opt = app.add_option("--fft-size", fft_size, "FFT size for the CFO search (power of two)")
                        ->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "master random seed");
    app.add_flag("--plot", spec.plot, "write SVG figures (campaign)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return kInputError;
    }

    if (command == "campaign") spec.command = Command::campaign;
    else if (command == "estimate") spec.command = Command::estimate;
    else if (command == "crlb") spec.command = Command::crlb;
    else spec.command = Command::regularity;
    if (*config_opt) spec.config_path = config;
    spec.output_dir = output_dir;
    if (*trials_opt) spec.trials = trials;
    if (*fft_opt) spec.fft_size = fft_size;
    if (*seed_opt) spec.seed = seed;

    try {
        switch (spec.command) {
            case Command::campaign: return cmd_campaign(spec, out, err);
            case Command::estimate: return cmd_estimate(spec, out, err);
            case Command::crlb: return cmd_crlb(spec, out, err);
            case Command::regularity: return cmd_regularity(spec, out, err);
        }
    } catch (const SingularFim& e) {
        err << "error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const CholeskyFailure& e) {
        err << "error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const DegenerateSpectrum& e) {
        err << "error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

}  // namespace mmsync::cli
