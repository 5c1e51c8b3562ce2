// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/dsp.hpp"
#include "dpdlab/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace dpdlab;
using dsp::cplx;

namespace {

std::vector<cplx> tone(std::size_t n, double cycles_per_sample) {
    std::vector<cplx> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::polar(1.0, 2.0 * std::numbers::pi * cycles_per_sample * static_cast<double>(i));
    return x;
}

} // namespace

TEST(Dsp, IntegerDelayIsExactShift) {
    Rng r(1);
    std::vector<cplx> x(256);
    for (auto& v : x) v = r.complex_gaussian(1.0);
    const auto y = dsp::fractional_delay(x, 3.0);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(y[i], cplx{});
    for (std::size_t i = 3; i < x.size(); ++i) EXPECT_EQ(y[i], x[i - 3]);
}

TEST(Dsp, FractionalDelayOfToneIsPhaseShift) {
    const double f = 0.05;
    const auto x = tone(2048, f);
    const double d = 0.37;
    const auto y = dsp::fractional_delay(x, d);
    double max_err = 0.0;
    for (std::size_t i = 200; i < 1800; ++i) {
        const cplx expected = std::polar(1.0, 2.0 * std::numbers::pi * f * (static_cast<double>(i) - d));
        max_err = std::max(max_err, std::abs(y[i] - expected));
    }
    EXPECT_LT(max_err, 1e-4);
}

TEST(Dsp, ConvolveSameMatchesDirectSum) {
    const std::vector<cplx> x{{1, 0}, {2, 1}, {0, -1}, {3, 0}};
    const std::vector<cplx> h{{1, 0}, {0.5, 0.5}};
    const auto y = dsp::convolve_same(x, h);
    ASSERT_EQ(y.size(), 4u);
    EXPECT_EQ(y[0], x[0]);
    for (std::size_t n = 1; n < 4; ++n) EXPECT_NEAR(std::abs(y[n] - (x[n] + h[1] * x[n - 1])), 0.0, 1e-15);
}

TEST(Dsp, RationalResamplingPreservesInBandTone) {
    const auto x = tone(3000, 0.02);
    const auto y = dsp::resample_rational(x, 2, 3);
    ASSERT_EQ(y.size(), 2000u);
    // 0.02 cycles/sample at the input rate is 0.03 at the output rate.
    double max_err = 0.0;
    for (std::size_t i = 100; i < 1900; ++i)
        max_err = std::max(max_err, std::abs(y[i] - std::polar(1.0, 2.0 * std::numbers::pi * 0.03 * static_cast<double>(i))));
    EXPECT_LT(max_err, 1e-3);
}

TEST(Dsp, MeanPower) {
    const std::vector<cplx> x{{0, 0}, {2, 0}};
    EXPECT_DOUBLE_EQ(dsp::mean_power(x), 2.0);
}
