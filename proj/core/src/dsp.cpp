// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dpdlab::dsp {

namespace {

const double kInvI0Beta = 1.0 / std::cyl_bessel_i(0.0, kKaiserBeta);

double kaiser(double t, double half_width) {
    const double r = t / half_width;
    if (r <= -1.0 || r >= 1.0) return 0.0;
    return std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) * kInvI0Beta;
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

} // namespace

double windowed_sinc(double t, double cutoff, double half_width) {
    return cutoff * sinc(cutoff * t) * kaiser(t, half_width);
}

cplx interpolate_at(std::span<const cplx> x, double position) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const double base = std::floor(position);
    const double frac = position - base;
    const auto i0 = static_cast<std::ptrdiff_t>(base);
    if (frac == 0.0) return (i0 >= 0 && i0 < n) ? x[static_cast<std::size_t>(i0)] : cplx{};

    constexpr int half = kSincTaps / 2;
    cplx acc{};
    for (int k = -half + 1; k <= half; ++k) {
        const std::ptrdiff_t idx = i0 + k;
        if (idx < 0 || idx >= n) continue;
        acc += x[static_cast<std::size_t>(idx)] * windowed_sinc(frac - k, 1.0, half);
    }
    return acc;
}

std::vector<cplx> resample_shift(std::span<const cplx> x, double offset, std::size_t out_len,
                                 std::size_t start) {
    std::vector<cplx> out(out_len);
    const double base = std::floor(offset);
    const double frac = offset - base;
    const auto ibase = static_cast<std::ptrdiff_t>(base);
    const auto n = static_cast<std::ptrdiff_t>(x.size());

    if (frac == 0.0) {
        for (std::size_t i = 0; i < out_len; ++i) {
            const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(start + i) + ibase;
            if (src >= 0 && src < n) out[i] = x[static_cast<std::size_t>(src)];
        }
        return out;
    }

    // Same fractional part for every output sample: precompute the taps.
    constexpr int half = kSincTaps / 2;
    double taps[kSincTaps];
    for (int k = -half + 1; k <= half; ++k) taps[k + half - 1] = windowed_sinc(frac - k, 1.0, half);

    for (std::size_t i = 0; i < out_len; ++i) {
        const std::ptrdiff_t centre = static_cast<std::ptrdiff_t>(start + i) + ibase;
        // Position centre + frac must lie inside the record.
        if (centre < 0 || centre > n - 2) continue;
        cplx acc{};
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(centre - half + 1, 0);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(centre + half, n - 1);
        for (std::ptrdiff_t idx = lo; idx <= hi; ++idx)
            acc += x[static_cast<std::size_t>(idx)] * taps[idx - centre + half - 1];
        out[i] = acc;
    }
    return out;
}

std::vector<cplx> fractional_delay(std::span<const cplx> x, double delay) {
    return resample_shift(x, -delay, x.size());
}

std::vector<cplx> resample_rational(std::span<const cplx> x, int up, int down) {
    const std::size_t out_len = x.size() * static_cast<std::size_t>(up) / static_cast<std::size_t>(down);
    std::vector<cplx> out(out_len);
    if (up == down) {
        std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(out_len), out.begin());
        return out;
    }
    const double cutoff = std::min(1.0, static_cast<double>(up) / down);
    const double half_width = (kSincTaps / 2) / cutoff;
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    for (std::size_t m = 0; m < out_len; ++m) {
        const double t = static_cast<double>(m) * down / up;
        const auto lo = std::max<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::ceil(t - half_width)), 0);
        const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::floor(t + half_width)), n - 1);
        cplx acc{};
        for (std::ptrdiff_t k = lo; k <= hi; ++k)
            acc += x[static_cast<std::size_t>(k)] * windowed_sinc(t - static_cast<double>(k), cutoff, half_width);
        out[m] = acc;
    }
    return out;
}

std::vector<cplx> convolve_same(std::span<const cplx> x, std::span<const cplx> taps) {
    std::vector<cplx> out(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        cplx acc{};
        const std::size_t kmax = std::min(taps.size(), n + 1);
        for (std::size_t k = 0; k < kmax; ++k) acc += taps[k] * x[n - k];
        out[n] = acc;
    }
    return out;
}

double mean_power(std::span<const cplx> x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& v : x) acc += std::norm(v);
    return acc / static_cast<double>(x.size());
}

} // namespace dpdlab::dsp
