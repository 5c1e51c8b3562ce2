// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/dsp.hpp"
#include "dpdlab/error.hpp"
#include "dpdlab/metrics.hpp"
#include "dpdlab/pa.hpp"
#include "dpdlab/random.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace dpdlab;

namespace {

ComplexWaveform with_noise(const ComplexWaveform& w, double relative_power, std::uint64_t seed) {
    Rng r(seed);
    std::vector<cplx> v(w.samples().begin(), w.samples().end());
    const double p = relative_power * w.mean_power();
    for (auto& s : v) s += r.complex_gaussian(p);
    return w.with_samples(std::move(v));
}

} // namespace

TEST(Nmse, IdenticalClampsAtFloor) {
    const auto w = generate_ofdm({}, 1).first;
    EXPECT_EQ(nmse(w, w), kMetricFloorDb);
}

TEST(Nmse, ScaledReferenceHandValue) {
    const auto w = generate_ofdm({}, 1).first;
    EXPECT_NEAR(nmse(w, w.scaled(1.0 + 1e-3)), -60.0, 1e-6);
}

TEST(Nmse, AwgnAtMinus50) {
    const auto w = generate_ofdm({}, 2).first;
    EXPECT_NEAR(nmse(w, with_noise(w, 1e-5, 3)), -50.0, 0.3);
}

TEST(Nmse, Errors) {
    const ComplexWaveform a({cplx{1, 0}, cplx{0, 1}}, 1.0), b({cplx{1, 0}}, 1.0);
    EXPECT_THROW(nmse(a, b), ShapeError);
    const ComplexWaveform z({cplx{}, cplx{}}, 1.0);
    EXPECT_THROW(nmse(z, a), UndefinedMetricError);
}

TEST(Evm, ExactResynthesisClampsAtFloor) {
    const OfdmConfig cfg;
    const auto [w, grid] = generate_ofdm(cfg, 4);
    EXPECT_EQ(evm_subcarrier(grid, w, cfg), kMetricFloorDb);
}

TEST(Evm, EqualizerRemovesLinearFilter) {
    const OfdmConfig cfg;
    const auto [w, grid] = generate_ofdm(cfg, 5);
    const std::vector<cplx> taps{{1.0, 0.0}, {0.3, -0.2}};
    const auto y = w.with_samples(dsp::convolve_same(w.samples(), taps));
    EXPECT_LE(evm_subcarrier(grid, y, cfg), -100.0);
}

TEST(Evm, AwgnAtMinus40InBand) {
    const OfdmConfig cfg;
    const auto [w, grid] = generate_ofdm(cfg, 6);
    // White noise spreads over every synthesis bin; scale so the occupied
    // bins see -40 dB.
    const double m = static_cast<double>(cfg.synthesis_size());
    const double k = static_cast<double>(cfg.occupied_subcarriers);
    EXPECT_NEAR(evm_subcarrier(grid, with_noise(w, 1e-4 * m / k, 7), cfg), -40.0, 0.5);
}

TEST(Evm, MisalignedCaptureRaises) {
    const OfdmConfig cfg;
    const auto [w, grid] = generate_ofdm(cfg, 8);
    const auto shifted = w.with_samples(dsp::fractional_delay(w.samples(), 700.0));
    EXPECT_THROW(evm_subcarrier(grid, shifted, cfg), AlignmentError);
}

TEST(Psd, ToneLandsOnItsBinAtZeroDb) {
    const std::size_t len = 1024, n = 16384;
    const double fs = 1e6, f0 = fs * 100.0 / len;
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::polar(1.0, 2.0 * std::numbers::pi * f0 / fs * static_cast<double>(i));
    PsdConfig cfg;
    cfg.segment_len = len;
    const auto p = psd(ComplexWaveform(std::move(v), fs), cfg);
    const auto peak = std::max_element(p.level_db.begin(), p.level_db.end()) - p.level_db.begin();
    EXPECT_NEAR(p.freq_hz[static_cast<std::size_t>(peak)], f0, 1e-6);
    EXPECT_NEAR(p.level_db[static_cast<std::size_t>(peak)], 0.0, 1e-12);
    EXPECT_NEAR(p.total_power, 1.0, 1e-9);
}

TEST(Psd, FrequencyAxisAscendingAndCentred) {
    const auto w = generate_ofdm({}, 1).first;
    const auto p = psd(w);
    ASSERT_EQ(p.freq_hz.size(), 4096u);
    EXPECT_TRUE(std::is_sorted(p.freq_hz.begin(), p.freq_hz.end()));
    EXPECT_DOUBLE_EQ(p.freq_hz[2048], 0.0);
    EXPECT_DOUBLE_EQ(p.freq_hz[0], -w.sample_rate() / 2.0);
}

TEST(Psd, WhiteNoiseIsFlat) {
    PsdConfig cfg;
    cfg.segment_len = 256;
    const std::size_t segments = 100;
    Rng r(9);
    std::vector<cplx> v(cfg.segment_len * (segments + 1) / 2);
    for (auto& s : v) s = r.complex_gaussian(1.0);
    const auto p = psd(ComplexWaveform(std::move(v), 1.0), cfg);
    double mean_lin = 0.0;
    for (const double d : p.level_db) mean_lin += std::pow(10.0, d / 10.0);
    const double mean_db = 10.0 * std::log10(mean_lin / static_cast<double>(p.level_db.size()));
    for (const double d : p.level_db) EXPECT_NEAR(d, mean_db, 1.5);
    EXPECT_NEAR(p.total_power, 1.0, 0.05);
}

TEST(Psd, OfdmOutOfBandFloor) {
    const OfdmConfig cfg;
    const auto w = generate_ofdm(cfg, 3).first;
    const auto p = psd(w);
    const double edge = cfg.bandwidth_hz / 2.0;
    double in_band = 0.0, out_band = 0.0;
    std::size_t n_in = 0, n_out = 0;
    for (std::size_t i = 0; i < p.freq_hz.size(); ++i) {
        const double f = std::abs(p.freq_hz[i]);
        const double lin = std::pow(10.0, p.level_db[i] / 10.0);
        if (f < 0.9 * edge) {
            in_band += lin;
            ++n_in;
        } else if (f > 1.4 * edge) {
            out_band += lin;
            ++n_out;
        }
    }
    const double plateau_db = 10.0 * std::log10(in_band / static_cast<double>(n_in));
    const double floor_db = 10.0 * std::log10(out_band / static_cast<double>(n_out));
    EXPECT_LE(floor_db, plateau_db - 40.0);
}

TEST(AmAm, DoubledCopy) {
    const auto x = generate_ofdm({}, 2).first;
    for (const auto& pt : amam_ampm(x, x.scaled(2.0))) {
        EXPECT_NEAR(pt.output_amplitude, 2.0 * pt.input_amplitude, 1e-12);
        EXPECT_NEAR(pt.phase_delta, 0.0, 1e-12);
    }
}

TEST(AmAm, MemorylessCurveHasNoWidth) {
    auto pa = make_reference_pa(PaPreset::TestbedLike);
    pa.memory_fir = {cplx{1.0, 0.0}};
    // 30 discrete amplitudes with random phases, one amplitude per bin.
    Rng r(4);
    std::vector<cplx> v(6000);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = std::polar(0.1 * static_cast<double>(1 + i % 30), 2.0 * std::numbers::pi * r.uniform01());
    const ComplexWaveform x(std::move(v), 1.0);
    const auto pts = amam_ampm(x, apply_pa(pa, x));
    EXPECT_LT(amam_scatter_width(pts, 0.05, 3.05, 30), 1e-9);
}

TEST(AmAm, MemoryWidensScatter) {
    const auto pa = make_reference_pa(PaPreset::TestbedLike);
    const auto x = generate_ofdm({}, 2).first;
    EXPECT_GT(amam_scatter_width(amam_ampm(x, apply_pa(pa, x)), 0.5, 2.5, 20), 0.05);
}
