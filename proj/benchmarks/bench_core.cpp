// SPDX-License-Identifier: Apache-2.0
// Microbenchmarks for the hot paths of one ILC iteration and a GMP fit.
#include "dpdlab/align.hpp"
#include "dpdlab/capture.hpp"
#include "dpdlab/gmp.hpp"
#include "dpdlab/metrics.hpp"
#include "dpdlab/pa.hpp"
#include "dpdlab/waveform.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace dpdlab;

ComplexWaveform test_waveform(std::size_t symbols) {
    OfdmConfig cfg;
    cfg.num_symbols = symbols;
    return normalize_rms(generate_ofdm(cfg, 7).first, 1.0);
}

void BM_GenerateOfdm(benchmark::State& state) {
    OfdmConfig cfg;
    cfg.num_symbols = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(generate_ofdm(cfg, 7));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.total_samples()));
}
BENCHMARK(BM_GenerateOfdm)->Arg(4)->Arg(20);

void BM_ApplyPa(benchmark::State& state) {
    const auto x = test_waveform(20);
    const auto pa = make_reference_pa(PaPreset::TestbedLike);
    for (auto _ : state) benchmark::DoNotOptimize(apply_pa(pa, x));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(x.size()));
}
BENCHMARK(BM_ApplyPa);

void BM_CaptureChain(benchmark::State& state) {
    const auto y = test_waveform(20);
    CaptureConfig cfg;
    cfg.quantizer.mode = state.range(0) ? QuantizerMode::Logarithmic : QuantizerMode::Uniform;
    cfg.quantizer.rho = state.range(0) ? rho_from_db(16.0) : 1.0;
    cfg.noise_snr_db = 60.0;
    cfg.fractional_delay_samples = 0.37;
    for (auto _ : state) benchmark::DoNotOptimize(capture_chain(y, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(y.size()));
}
BENCHMARK(BM_CaptureChain)->Arg(0)->Arg(1);

void BM_EstimateDelay(benchmark::State& state) {
    const auto s = test_waveform(6);
    CaptureConfig cfg;
    cfg.quantizer.enabled = false;
    cfg.fractional_delay_samples = 0.4;
    const auto y = capture_chain(s, cfg);
    const int resolution = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(estimate_delay(s, y, resolution));
}
BENCHMARK(BM_EstimateDelay)->Arg(8)->Arg(32)->Arg(128);

void BM_FitGmp(benchmark::State& state) {
    const auto s = test_waveform(20);
    const auto x = apply_pa(make_reference_pa(PaPreset::Mild), s);
    GmpConfig cfg;
    cfg.order_K = static_cast<int>(state.range(0));
    const std::vector<ComplexWaveform> train{s};
    const std::vector<ComplexWaveform> target{x};
    for (auto _ : state) benchmark::DoNotOptimize(fit_gmp(train, target, cfg));
}
BENCHMARK(BM_FitGmp)->Arg(3)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_Psd(benchmark::State& state) {
    const auto w = test_waveform(20);
    for (auto _ : state) benchmark::DoNotOptimize(psd(w));
}
BENCHMARK(BM_Psd);

}  // namespace

BENCHMARK_MAIN();
