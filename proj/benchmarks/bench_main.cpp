#include <benchmark/benchmark.h>

#include "mmsync/angles.hpp"
#include "mmsync/crlb.hpp"
#include "mmsync/estimators.hpp"
#include "mmsync/montecarlo.hpp"
#include "mmsync/signal_model.hpp"

namespace {

mmsync::SyncParams scenario(std::size_t chains) {
    mmsync::SyncParams p;
    for (std::size_t i = 0; i < chains; ++i) {
        p.amplitudes.push_back(0.5 + 0.1 * static_cast<double>(i));
        p.phases.push_back(mmsync::wrap_two_pi(0.7 * static_cast<double>(i + 1)));
    }
    p.cfo = 0.123;
    p.noise_var = 0.1;
    return p;
}

void BM_EstimateAll(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto p = scenario(4);
    const auto t = mmsync::gen_training(n, 1);
    const auto r = mmsync::synthesize(p, t, 2);
    for (auto _ : state) benchmark::DoNotOptimize(mmsync::estimate_all(r, t));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EstimateAll)->Arg(64)->Arg(256)->Arg(1024);

void BM_EstimateCfoFftSize(benchmark::State& state) {
    const auto p = scenario(4);
    const auto t = mmsync::gen_training(64, 1);
    const auto r = mmsync::synthesize(p, t, 2);
    const auto k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(mmsync::estimate_cfo(r, t, k));
}
BENCHMARK(BM_EstimateCfoFftSize)->RangeMultiplier(4)->Range(64, 16384);

void BM_Synthesize(benchmark::State& state) {
    const auto p = scenario(4);
    const auto t = mmsync::gen_training(64, 1);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(mmsync::synthesize(p, t, seed++));
}
BENCHMARK(BM_Synthesize);

void BM_CrlbNumeric(benchmark::State& state) {
    const auto p = scenario(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mmsync::crlb_numeric(p, 64));
}
BENCHMARK(BM_CrlbNumeric)->Arg(1)->Arg(4)->Arg(16);

void BM_Campaign(benchmark::State& state) {
    mmsync::McConfig cfg;
    cfg.n_trials = static_cast<std::size_t>(state.range(0));
    cfg.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(mmsync::run_campaign(cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.n_trials * cfg.snr_grid_db.size()));
}
BENCHMARK(BM_Campaign)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
