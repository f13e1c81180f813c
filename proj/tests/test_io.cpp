#include <doctest.h>

#include <sstream>

#include "mmsync/config.hpp"
#include "mmsync/csv.hpp"
#include "mmsync/errors.hpp"
#include "mmsync/svg_plot.hpp"

using namespace mmsync;

TEST_CASE("key-value config") {
    const auto cfg = KeyValueConfig::parse(
        "# campaign\n"
        "n_trials = 250\n"
        "snr_grid_db = -5, 0, 5.5\n"
        "  plot=yes  # inline comment\n"
        "gain_model = channel\n"
        "\n"
        "rays_per_cluster = 3,4\n",
        "test.cfg");
    CHECK(cfg.get_size("n_trials", 0) == 250);
    CHECK(cfg.get_doubles("snr_grid_db", {}) == std::vector<double>{-5.0, 0.0, 5.5});
    CHECK(cfg.get_bool("plot", false));
    CHECK(cfg.get_string("gain_model", "") == "channel");
    CHECK(cfg.get_sizes("rays_per_cluster", {}) == std::vector<std::size_t>{3, 4});
    CHECK(cfg.get_double("missing", 2.5) == 2.5);
    CHECK(cfg.unknown_keys({"n_trials", "snr_grid_db", "plot", "gain_model"}) ==
          std::vector<std::string>{"rays_per_cluster"});

    const auto bad = KeyValueConfig::parse("n = sixty\nflag = maybe\n", "bad.cfg");
    try {
        bad.get_size("n", 0);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("bad.cfg:1") != std::string::npos);
        CHECK(what.find("'n'") != std::string::npos);
    }
    CHECK_THROWS_AS(bad.get_bool("flag", false), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse("just words\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse("n = -3\n").get_size("n", 0), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/dir/x.cfg"), ConfigError);
}

TEST_CASE("block CSV round trip") {
    const SyncParams p{{0.5, 0.25}, {1.0, 2.0}, 0.1, 0.3};
    const TrainingBlock t = gen_training(16, 1);
    const ReceivedBlock r = synthesize(p, t, 4);
    std::stringstream io;
    write_block_csv(r, io);
    const ReceivedBlock back = read_block_csv(io);
    CHECK(back.samples == r.samples);

    std::stringstream tio;
    write_training_csv(t, tio);
    const TrainingBlock t2 = read_training_csv(tio);
    CHECK(std::equal(t.symbols().begin(), t.symbols().end(), t2.symbols().begin()));
}

TEST_CASE("malformed block CSV") {
    auto expect_error = [](const std::string& text, std::size_t row, std::size_t column) {
        std::istringstream in(text);
        try {
            read_block_csv(in);
            FAIL("expected CsvError for: " << text);
        } catch (const CsvError& e) {
            CHECK(e.row() == row);
            CHECK(e.column() == column);
        }
    };
    expect_error("1,0,2,0\n1,0,2\n", 2, 3);
    expect_error("1,0,2,0\n1,0,x,0\n", 2, 3);
    expect_error("1,0,2\n", 1, 3);
    expect_error("# header only\n", 1, 1);
    expect_error("1,0,2,0\n1,0,2,0,3,0\n", 2, 6);

    std::istringstream ok("# comment\n\n1,0,2,0\n0,1,0,-1\n");
    const ReceivedBlock r = read_block_csv(ok);
    CHECK(r.chains() == 2);
    CHECK(r.length() == 2);
    CHECK(r.samples(1, 1) == cplx(0.0, -1.0));
}

TEST_CASE("estimate and bound CSV") {
    EstimateReport est;
    est.cfo_hat = 0.125;
    est.fft_size = 256;
    est.peak_bin = 32;
    est.alpha_hat = {1.0, 2.0};
    est.beta_hat = {0.5, 0.25};
    est.gamma_hat = {4.0, 16.0};
    est.noise_var_hat = 0.25;
    est.snr_hat = 10.0;
    std::ostringstream os;
    write_estimate_csv(est, os);
    std::istringstream in(os.str());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header ==
          "cfo_hat,fft_size,peak_bin,peak_offset,noise_var_hat,snr_hat,alpha_hat_1,alpha_hat_2,beta_hat_1,"
          "beta_hat_2,gamma_hat_1,gamma_hat_2");
    CHECK(row.rfind("0.125,256,32,", 0) == 0);

    const CrlbReport bound = crlb_numeric(SyncParams{{1.0}, {0.0}, 0.0, 1.0}, 64);
    std::ostringstream cs;
    write_crlb_csv(bound, 0.0, cs);
    const std::string text = cs.str();
    CHECK(text.rfind("snr_db,parameter,bound\n", 0) == 0);
    CHECK(text.find("0,alpha_1,0.0078125\n") != std::string::npos);
    CHECK(text.find(",noise_var,") != std::string::npos);
    CHECK(text.find(",gamma_1,") != std::string::npos);
}

TEST_CASE("svg rendering") {
    PlotFigure f{"Variance", "SNR (dB)", "normalized variance", true, {}};
    f.series.push_back({"alpha_1", {-5, 0, 5}, {1e-1, 1e-2, 1e-3}, false});
    f.series.push_back({"NCRLB alpha_1", {-5, 0, 5}, {5e-2, 0.0, 5e-4}, true});
    const std::string svg = render_svg(f);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    CHECK(svg.find("NCRLB alpha_1") != std::string::npos);
    CHECK(svg.find("nan") == std::string::npos);
    CHECK(svg.find("inf") == std::string::npos);

    PlotFigure linear{"Bias & <more>", "x", "y", false, {}};
    linear.series.push_back({"a", {0, 1}, {-0.1, 0.2}, false});
    const std::string text = render_svg(linear);
    CHECK(text.find("Bias &amp; &lt;more&gt;") != std::string::npos);
}
