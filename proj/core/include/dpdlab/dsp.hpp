// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dpdlab::dsp {

using cplx = std::complex<double>;

// Interpolation kernel length for fractional delays: 64 taps, Kaiser window.
inline constexpr int kSincTaps = 64;
inline constexpr double kKaiserBeta = 8.0;

// Kaiser-windowed sinc with the given cutoff (fraction of Nyquist, <= 1).
// The window spans |t| < half_width samples; zero outside.
double windowed_sinc(double t, double cutoff, double half_width);

// Band-limited value of x at a real-valued position; x is zero outside its
// record. Integer positions return the sample itself exactly.
cplx interpolate_at(std::span<const cplx> x, double position);

// out[i] = x(start + i + offset) for i in [0, out_len). Positions outside the
// source record produce 0.
std::vector<cplx> resample_shift(std::span<const cplx> x, double offset, std::size_t out_len,
                                 std::size_t start = 0);

// out[n] = x(n - delay), same length as x, zero history.
std::vector<cplx> fractional_delay(std::span<const cplx> x, double delay);

// Rational resampling by up/down with an anti-alias windowed sinc.
// Output length is floor(x.size() * up / down).
std::vector<cplx> resample_rational(std::span<const cplx> x, int up, int down);

// Causal convolution truncated to x.size() samples (zero initial state).
std::vector<cplx> convolve_same(std::span<const cplx> x, std::span<const cplx> taps);

double mean_power(std::span<const cplx> x);

} // namespace dpdlab::dsp
