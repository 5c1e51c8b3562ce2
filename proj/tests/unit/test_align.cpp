// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/align.hpp"
#include "dpdlab/dsp.hpp"
#include "dpdlab/error.hpp"
#include "dpdlab/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace dpdlab;

namespace {

ComplexWaveform reference() {
    OfdmConfig cfg;
    cfg.num_symbols = 4;
    return generate_ofdm(cfg, 21).first;
}

ComplexWaveform delayed(const ComplexWaveform& w, double d, cplx gain) {
    auto v = dsp::fractional_delay(w.samples(), d);
    for (auto& s : v) s *= gain;
    return w.with_samples(std::move(v));
}

double guarded_nmse(const ComplexWaveform& ref, const ComplexWaveform& test) {
    const auto r = guarded_range(ref.size());
    return nmse(ref.samples().subspan(r.begin, r.size()), test.samples().subspan(r.begin, r.size()));
}

} // namespace

TEST(EstimateDelay, IdentityCase) {
    const auto s = reference();
    const auto a = estimate_delay(s, s);
    EXPECT_EQ(a.integer_delay, 0);
    EXPECT_EQ(a.fractional_delay, 0.0);
    EXPECT_NEAR(std::abs(a.complex_gain - cplx(1.0, 0.0)), 0.0, 1e-12);
    EXPECT_LE(a.residual_nmse_db, -200.0);
    EXPECT_EQ(apply_alignment(s, a), s);
}

TEST(EstimateDelay, InjectedDelayAndGain) {
    const auto s = reference();
    const cplx g = std::polar(2.0, std::numbers::pi / 3);
    const auto a = estimate_delay(s, delayed(s, 3.25, g), 32);
    EXPECT_EQ(a.integer_delay, 3);
    EXPECT_LE(std::abs(a.fractional_delay - 0.25), 1.0 / 32.0);
    EXPECT_LT(std::abs(a.complex_gain - g) / std::abs(g), 0.01);
}

TEST(EstimateDelay, FinerResolutionLowersResidual) {
    const auto s = reference();
    const auto y = delayed(s, 5.37, {1.0, 0.0});
    EXPECT_LT(estimate_delay(s, y, 256).residual_nmse_db, estimate_delay(s, y, 4).residual_nmse_db);
}

TEST(EstimateDelay, FractionalDelayOnResolutionGrid) {
    const auto s = reference();
    const auto a = estimate_delay(s, delayed(s, 2.4, {1.0, 0.0}), 8);
    const double scaled = a.fractional_delay * 8.0;
    EXPECT_NEAR(scaled, std::round(scaled), 1e-12);
    EXPECT_GE(a.fractional_delay, 0.0);
    EXPECT_LT(a.fractional_delay, 1.0);
}

TEST(EstimateDelay, PeriodicCaptureIsAmbiguous) {
    const auto s = reference();
    std::vector<cplx> twice(s.samples().begin(), s.samples().end());
    twice.insert(twice.end(), s.samples().begin(), s.samples().end());
    EXPECT_THROW(estimate_delay(s, s.with_samples(std::move(twice))), AmbiguityError);
}

TEST(EstimateDelay, RejectsBadResolution) {
    const auto s = reference();
    EXPECT_THROW(estimate_delay(s, s, 0), DomainError);
    EXPECT_THROW(estimate_delay(s, s, 1024), DomainError);
}

TEST(ApplyAlignment, RoundTripRecoversReference) {
    const auto s = reference();
    for (const double d : {3.25, 5.75, 12.03125}) {
        const auto y = delayed(s, d, std::polar(0.7, -1.0));
        const auto a = estimate_delay(s, y, 32);
        const auto back = apply_alignment(y, a, s.size());
        EXPECT_LE(guarded_nmse(s, back), -60.0) << "delay " << d;
        EXPECT_NEAR(back.rms() / s.rms(), 1.0, 0.01);
    }
}

TEST(GuardedRange, TrimsOnlyLongRecords) {
    const auto r = guarded_range(1000);
    EXPECT_EQ(r.begin, kGuardSamples);
    EXPECT_EQ(r.end, 1000 - kGuardSamples);
    const auto short_r = guarded_range(100);
    EXPECT_EQ(short_r.begin, 0u);
    EXPECT_EQ(short_r.end, 100u);
}
