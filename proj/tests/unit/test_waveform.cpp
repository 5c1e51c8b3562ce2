// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/error.hpp"
#include "dpdlab/waveform.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

using namespace dpdlab;

TEST(ComplexWaveform, RejectsEmptyAndNonFinite) {
    EXPECT_THROW(ComplexWaveform({}, 1.0), Error);
    EXPECT_THROW(ComplexWaveform({cplx{std::numeric_limits<double>::quiet_NaN(), 0}}, 1.0), Error);
    EXPECT_THROW(ComplexWaveform({cplx{1, 0}}, 0.0), Error);
}

TEST(OfdmConfig, DefaultsAndDerivedSizes) {
    const OfdmConfig cfg;
    EXPECT_EQ(cfg.synthesis_size(), 1536u);
    EXPECT_EQ(cfg.cyclic_prefix_samples(), 96u);
    EXPECT_EQ(cfg.total_samples(), 20u * (1536u + 96u));
    EXPECT_DOUBLE_EQ(cfg.sample_rate(), 614.4e6);
    const auto idx = cfg.subcarrier_indices();
    ASSERT_EQ(idx.size(), 800u);
    EXPECT_EQ(idx.front(), -400);
    EXPECT_EQ(idx.back(), 400);
    for (const int k : idx) EXPECT_NE(k, 0);
}

TEST(OfdmConfig, OccupiedMustBeBelowFftSize) {
    OfdmConfig cfg;
    cfg.occupied_subcarriers = cfg.fft_size;
    EXPECT_THROW(cfg.validate(), ConfigError);
    EXPECT_THROW(generate_ofdm(cfg, 1), ConfigError);
}

TEST(GenerateOfdm, GridEntriesAreConstellationPoints) {
    OfdmConfig cfg;
    cfg.num_symbols = 2;
    for (const auto c : {Constellation::Qpsk, Constellation::Qam16, Constellation::Qam64, Constellation::Qam256}) {
        cfg.constellation = c;
        const auto [w, grid] = generate_ofdm(cfg, 5);
        EXPECT_EQ(grid.data_symbols.size(), 2u * 800u);
        for (const auto& v : grid.data_symbols) EXPECT_TRUE(is_constellation_point(c, v));
        EXPECT_NEAR(w.rms(), 1.0, 1e-12);
    }
}

TEST(GenerateOfdm, DeterministicForSeed) {
    const OfdmConfig cfg;
    EXPECT_EQ(generate_ofdm(cfg, 11).first, generate_ofdm(cfg, 11).first);
    EXPECT_FALSE(generate_ofdm(cfg, 11).first == generate_ofdm(cfg, 12).first);
}

TEST(GenerateOfdm, SingleToneHasFlatEnvelope) {
    OfdmConfig cfg;
    cfg.fft_size = 64;
    cfg.occupied_subcarriers = 1;
    cfg.num_symbols = 1;
    cfg.cyclic_prefix_len = 4;
    cfg.constellation = Constellation::Qpsk;
    cfg.oversampling = {1, 1};
    cfg.edge_taper_len = 0;
    const auto [w, grid] = generate_ofdm(cfg, 3);
    EXPECT_NEAR(measure_papr(w), 0.0, 1e-9);
}

TEST(GenerateOfdm, DefaultPaprNearOperatingPoint) {
    const OfdmConfig cfg;
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const double p = measure_papr(generate_ofdm(cfg, seed).first);
        EXPECT_GT(p, 8.0);
        EXPECT_LT(p, 14.0);
        sum += p;
    }
    const double mean = sum / 20.0;
    EXPECT_GE(mean, 10.0);
    EXPECT_LE(mean, 12.0);
}

TEST(OfdmConfig, TaperMustFitInCyclicPrefix) {
    OfdmConfig cfg;
    cfg.edge_taper_len = cfg.cyclic_prefix_samples() + 1;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(GenerateOfdm, TaperLeavesFftWindowUntouched) {
    OfdmConfig tapered, plain;
    tapered.num_symbols = plain.num_symbols = 3;
    plain.edge_taper_len = 0;
    const auto grid = generate_ofdm(tapered, 2).second;
    const auto a = synthesize_ofdm(grid, tapered);
    const auto b = synthesize_ofdm(grid, plain);
    const std::size_t cp = plain.cyclic_prefix_samples();
    for (std::size_t s = 0; s < 3; ++s)
        for (std::size_t i = cp; i < plain.symbol_samples(); ++i) {
            const std::size_t n = s * plain.symbol_samples() + i;
            EXPECT_EQ(a[n], b[n]);
        }
    EXPECT_FALSE(a == b);
}

TEST(GenerateOfdm, DemodulationRecoversGrid) {
    OfdmConfig cfg;
    cfg.num_symbols = 3;
    const auto grid = generate_ofdm(cfg, 8).second;
    const auto w = synthesize_ofdm(grid, cfg);
    const auto bins = demodulate_ofdm(w.samples(), cfg);
    ASSERT_EQ(bins.size(), grid.data_symbols.size());
    for (std::size_t i = 0; i < bins.size(); ++i) EXPECT_NEAR(std::abs(bins[i] - grid.data_symbols[i]), 0.0, 1e-12);
}

TEST(Papr, TwoSampleHandValue) {
    const ComplexWaveform w({cplx{0, 0}, cplx{2, 0}}, 1.0);
    EXPECT_NEAR(measure_papr(w), 3.010299956639812, 1e-12);
}

TEST(Papr, NeverNegative) {
    for (std::uint64_t seed = 1; seed < 5; ++seed) EXPECT_GE(measure_papr(generate_ofdm({}, seed).first), 0.0);
}

TEST(NormalizeRms, HalvesAndIsIdempotent) {
    const ComplexWaveform w({cplx{2, 0}, cplx{0, 2}, cplx{-2, 0}}, 1.0);
    const auto h = normalize_rms(w, 1.0);
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(h[i], w[i] * 0.5);
    EXPECT_EQ(normalize_rms(h, 1.0), h);
    const auto o = generate_ofdm({}, 4).first;
    EXPECT_NEAR(measure_papr(normalize_rms(o, 3.0)), measure_papr(o), 1e-9);
}

TEST(WaveformIo, BinaryRoundTripIsExact) {
    const auto path = std::filesystem::temp_directory_path() / "dpdlab_wave_roundtrip.bin";
    const auto w = generate_ofdm({}, 9).first;
    write_waveform(path, w);
    EXPECT_EQ(read_waveform(path), w);
    std::filesystem::remove(path);
}

TEST(WaveformIo, GridCsvRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "dpdlab_grid_roundtrip.csv";
    OfdmConfig cfg;
    cfg.num_symbols = 2;
    const auto grid = generate_ofdm(cfg, 9).second;
    write_grid_csv(path, grid);
    const auto back = read_grid_csv(path);
    EXPECT_EQ(back.num_symbols, grid.num_symbols);
    EXPECT_EQ(back.subcarrier_indices, grid.subcarrier_indices);
    EXPECT_EQ(back.data_symbols, grid.data_symbols);
    std::filesystem::remove(path);
}

TEST(WaveformIo, RejectsGarbage) {
    const auto path = std::filesystem::temp_directory_path() / "dpdlab_garbage.bin";
    { std::ofstream(path) << "not a waveform"; }
    EXPECT_THROW(read_waveform(path), IoError);
    std::filesystem::remove(path);
}
