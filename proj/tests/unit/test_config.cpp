// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/config.hpp"
#include "dpdlab/error.hpp"

#include <gtest/gtest.h>

using namespace dpdlab;

TEST(ParseConfig, DefaultsNeedOnlyAGrid) {
    const auto c = parse_config("sweep.rho_db = 0\n");
    EXPECT_EQ(c.scenario, Scenario::RhoSweep);
    EXPECT_EQ(c.num_train_waveforms, 10);
    EXPECT_EQ(c.num_test_waveforms, 10);
    EXPECT_EQ(c.capture.quantizer.bits, 12);
    EXPECT_EQ(c.align_resolution, 32);
    EXPECT_EQ(c.ilc.step_mu, 0.5);
    EXPECT_EQ(c.gmp_fit_rho_db, 16.0);
    EXPECT_EQ(c.waveform, OfdmConfig{});
}

TEST(ParseConfig, RangeAndListSyntax) {
    const auto c = parse_config("sweep.rho_db = -1:1:23\nsweep.power_db = -10, -5, 0.5\n");
    ASSERT_EQ(c.rho_grid_db.size(), 25u);
    EXPECT_EQ(c.rho_grid_db.front(), -1.0);
    EXPECT_EQ(c.rho_grid_db.back(), 23.0);
    EXPECT_EQ(c.power_grid_db, (std::vector<double>{-10.0, -5.0, 0.5}));
}

TEST(ParseConfig, CommentsAndWhitespace) {
    const auto c = parse_config("# header\n\n  seed = 77   # trailing\nscenario=gmp-fit\n");
    EXPECT_EQ(c.master_seed, 77u);
    EXPECT_EQ(c.scenario, Scenario::GmpFit);
}

TEST(ParseConfig, SectionsMapToFields) {
    const auto c = parse_config(R"(
scenario = power_sweep
sweep.power_db = -6:3:0
sweep.gmp_orders = 3, 5, 9
waveform.fft_size = 256
waveform.occupied_subcarriers = 200
waveform.cyclic_prefix = 16
waveform.num_symbols = 5
waveform.constellation = qam16
waveform.oversampling = 2/1
capture.quantizer.bits = 10
capture.quantizer.mode = logarithmic
capture.quantizer.rho_db = 20
capture.noise_snr_db = 60
capture.resample = 2/3
align.fractional_resolution = 64
ilc.max_iterations = 4
ilc.update_mode = gain_inverse
gmp.order = 5
gmp.memory_depth = 3
gmp.cross_memory = 2
gmp.include_leading = false
gmp.ridge = 1e-9
dataset.num_train = 2
dataset.num_test = 3
)");
    EXPECT_EQ(c.scenario, Scenario::PowerSweep);
    EXPECT_EQ(c.gmp_orders, (std::vector<int>{3, 5, 9}));
    EXPECT_EQ(c.waveform.fft_size, 256u);
    EXPECT_EQ(c.waveform.constellation, Constellation::Qam16);
    EXPECT_EQ(c.waveform.oversampling, (Rational{2, 1}));
    EXPECT_EQ(c.capture.quantizer.bits, 10);
    EXPECT_EQ(c.capture.quantizer.mode, QuantizerMode::Logarithmic);
    EXPECT_NEAR(c.capture.quantizer.rho, 10.0, 1e-12);
    EXPECT_EQ(*c.capture.noise_snr_db, 60.0);
    EXPECT_EQ(*c.capture.resample, (Rational{2, 3}));
    EXPECT_EQ(c.align_resolution, 64);
    EXPECT_EQ(c.ilc.update_mode, UpdateMode::GainInverse);
    EXPECT_EQ(c.gmp.cross_memory_M, 2);
    EXPECT_FALSE(c.gmp.include_leading);
    EXPECT_EQ(c.gmp.ridge, 1e-9);
    EXPECT_EQ(c.num_test_waveforms, 3);
}

TEST(ParseConfig, PresetAppliesBeforeOverridesRegardlessOfOrder) {
    const auto c = parse_config("pa.gain = 20\npa.rapp.saturation = 5\npa.preset = mild\nsweep.rho_db = 0\n");
    EXPECT_EQ(c.pa.small_signal_gain, 20.0);
    EXPECT_EQ(std::get<RappAmAm>(c.pa.amam).saturation, 5.0);
    EXPECT_EQ(c.pa.memory_fir.size(), 1u);
}

TEST(ParseConfig, CustomFir) {
    const auto c = parse_config("pa.memory_fir.re = 1, 0.1\npa.memory_fir.im = 0, -0.1\nsweep.rho_db = 0\n");
    ASSERT_EQ(c.pa.memory_fir.size(), 2u);
    EXPECT_EQ(c.pa.memory_fir[1], cplx(0.1, -0.1));
}

TEST(ParseConfig, Errors) {
    EXPECT_THROW(parse_config("sweep.rho_db = 0\nbogus.key = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("sweep.rho_db = 0\nseed = 1\nseed = 2\n"), ConfigError);
    EXPECT_THROW(parse_config("sweep.rho_db = 0\nseed 1\n"), ConfigError);
    EXPECT_THROW(parse_config("sweep.rho_db = 0\ncapture.quantizer.bits = twelve\n"), ConfigError);
    EXPECT_THROW(parse_config("scenario = rho_sweep\n"), ConfigError);  // empty grid
    EXPECT_THROW(parse_config("sweep.rho_db = 0, nan\n"), ConfigError);
    EXPECT_THROW(parse_config("sweep.rho_db = 0\nwaveform.occupied_subcarriers = 1024\n"), ConfigError);
    EXPECT_THROW(parse_config("sweep.rho_db = 0\npa.preset = qm45500\n"), ConfigError);
    EXPECT_THROW(parse_config("sweep.rho_db = 0\npa.saleh.alpha = 1\n"), ConfigError);  // amam is rapp
    EXPECT_THROW(parse_config("scenario = power_sweep\nsweep.power_db = 0, 1\nsweep.gmp_orders = 3\n"), ConfigError);
}

TEST(DefaultGmpOrder, RisesFromThreeToNine) {
    std::vector<int> orders;
    for (std::size_t i = 0; i < 7; ++i) orders.push_back(default_gmp_order(i, 7));
    EXPECT_EQ(orders, (std::vector<int>{3, 5, 5, 7, 7, 9, 9}));
    EXPECT_EQ(default_gmp_order(0, 1), 3);
    EXPECT_EQ(default_gmp_order(3, 4), 9);
}
