#include <benchmark/benchmark.h>

#include "cvqkd/channel_model.hpp"
#include "cvqkd/cpe.hpp"
#include "cvqkd/fft.hpp"
#include "cvqkd/harness.hpp"
#include "cvqkd/random.hpp"
#include "cvqkd/tx_frontend.hpp"

namespace {

using namespace cvqkd;

ExperimentConfig bench_config(std::size_t n_symbols) {
    ExperimentConfig cfg;
    cfg.n_symbols = n_symbols;
    cfg.calibration_frames = 2;
    cfg.pilot_snr_db = 15.0;
    return cfg;
}

void BM_SpectralFilter(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    ComplexFrame frame;
    frame.sample_rate_hz = 1e9;
    frame.samples.resize(n);
    auto draws = gaussian_stream(1, 2 * n, 1.0);
    for (std::size_t k = 0; k < n; ++k) frame.samples[k] = {draws[2 * k], draws[2 * k + 1]};
    for (auto _ : state) {
        auto out = rrc_filter(frame, 0.001, 20);
        benchmark::DoNotOptimize(out.samples.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SpectralFilter)->Arg(1 << 16)->Arg(655360);

void BM_UkfTracking(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    ComplexFrame frame;
    frame.sample_rate_hz = 1e9;
    frame.samples.resize(n);
    auto truth = wiener_phase(2, n, 2e3, 1e9);
    const double w = 2.0 * 3.14159265358979323846 * 0.3;
    for (std::size_t k = 0; k < n; ++k)
        frame.samples[k] = std::polar(1.0, w * double(k) + truth.theta[k]);
    frame = add_shot_noise(3, frame, 1.0);

    UkfParams params;
    params.process_noise_q = 1.2566e-5;
    params.measurement_noise_r = 1.0;
    for (auto _ : state) {
        auto est = ukf_cpe(frame, 300e6, params, 1.0);
        benchmark::DoNotOptimize(est.theta_hat.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_UkfTracking)->Arg(1 << 16)->Arg(1 << 18);

void BM_ArgumentCpe(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    ComplexFrame frame;
    frame.sample_rate_hz = 1e9;
    frame.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k) frame.samples[k] = std::polar(1.0, 1.885 * double(k));
    frame = add_shot_noise(4, frame, 0.01);
    for (auto _ : state) {
        auto est = argument_cpe(frame, 300e6);
        benchmark::DoNotOptimize(est.theta_hat.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ArgumentCpe)->Arg(1 << 16)->Arg(1 << 18);

void BM_SingleRepetition(benchmark::State& state) {
    auto cfg = bench_config(static_cast<std::size_t>(state.range(0)));
    snu_calibrate(cfg);  // prime the cache, not part of the repetition cost
    std::size_t rep = 0;
    for (auto _ : state) {
        auto result = run_single(cfg, rep++);
        benchmark::DoNotOptimize(result.methods.data());
    }
}
BENCHMARK(BM_SingleRepetition)->Arg(1 << 12)->Arg(1 << 15)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
