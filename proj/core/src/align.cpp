// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/align.hpp"

#include "dpdlab/dsp.hpp"
#include "dpdlab/error.hpp"
#include "dpdlab/fft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace dpdlab {

namespace {

// Search scores use at most this many samples from the middle of the record.
constexpr std::size_t kMaxSearchWindow = 16384;
// Lags this close to the main peak belong to its lobe, not a rival peak.
constexpr long long kMainLobeHalfWidth = 8;
constexpr double kAmbiguityDb = 0.1;

struct Fit {
    cplx gain;
    double residual;  // ||aligned/gain - ref||^2 / ||ref||^2
};

Fit fit_gain(std::span<const cplx> ref, std::span<const cplx> aligned) {
    cplx cross{};
    double ref_energy = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        cross += std::conj(ref[i]) * aligned[i];
        ref_energy += std::norm(ref[i]);
    }
    const cplx gain = cross / ref_energy;
    if (gain == cplx{}) return {gain, 1.0};
    double err = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) err += std::norm(aligned[i] / gain - ref[i]);
    return {gain, err / ref_energy};
}

double to_db_clamped(double ratio) {
    if (!(ratio > 0.0)) return -200.0;
    return std::max(-200.0, 10.0 * std::log10(ratio));
}

long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

} // namespace

SampleRange guarded_range(std::size_t length, std::size_t guard) {
    if (length > 2 * guard + guard) return {guard, length - guard};
    return {0, length};
}

AlignmentResult estimate_delay(const ComplexWaveform& reference, const ComplexWaveform& captured, int resolution) {
    if (resolution < 1 || resolution > kMaxFractionalResolution)
        throw DomainError("fractional resolution must be in [1, 512]");
    if (reference.sample_rate() != captured.sample_rate())
        throw ShapeError("reference and capture must share a sample rate");
    const std::size_t nr = reference.size();
    const std::size_t nc = captured.size();
    if (nr > 2 * nc || nc > 2 * nr) throw ShapeError("reference and capture lengths differ by more than 2x");
    if (!(reference.mean_power() > 0.0) || !(captured.mean_power() > 0.0))
        throw UndefinedMetricError("cannot align zero-power waveforms");

    // Cross-correlation c(tau) = sum_n captured(n + tau) conj(ref(n)).
    const std::size_t len = std::bit_ceil(nr + nc - 1);
    std::vector<cplx> a(len), b(len);
    std::copy(captured.samples().begin(), captured.samples().end(), a.begin());
    std::copy(reference.samples().begin(), reference.samples().end(), b.begin());
    auto fa = fft(a);
    const auto fb = fft(b);
    for (std::size_t k = 0; k < len; ++k) fa[k] *= std::conj(fb[k]);
    const auto corr = ifft(fa);

    const auto lag_of = [&](std::size_t k) {
        return k < nc ? static_cast<long long>(k) : static_cast<long long>(k) - static_cast<long long>(len);
    };
    const auto valid_lag = [&](long long lag) {
        return lag > -static_cast<long long>(nr) && lag < static_cast<long long>(nc);
    };

    long long best_lag = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < len; ++k) {
        const long long lag = lag_of(k);
        if (!valid_lag(lag)) continue;
        const double m = std::norm(corr[k]);
        if (m > best) {
            best = m;
            best_lag = lag;
        }
    }
    double rival = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
        const long long lag = lag_of(k);
        if (!valid_lag(lag) || std::llabs(lag - best_lag) <= kMainLobeHalfWidth) continue;
        rival = std::max(rival, std::norm(corr[k]));
    }
    if (rival > 0.0 && 10.0 * std::log10(best / rival) < kAmbiguityDb)
        throw AmbiguityError("cross-correlation has two peaks within 0.1 dB");

    // Evaluation window: guarded, centred, bounded.
    SampleRange win = guarded_range(nr);
    if (win.size() > kMaxSearchWindow) {
        const std::size_t mid = (win.begin + win.end) / 2;
        win = {mid - kMaxSearchWindow / 2, mid + kMaxSearchWindow / 2};
    }
    const auto ref_win = reference.samples().subspan(win.begin, win.size());

    // Candidates D = best_lag - 1 + r / R for r in [0, 2R].
    const long long base = (best_lag - 1) * resolution;
    long long best_step = base + resolution;
    Fit best_fit{cplx{}, std::numeric_limits<double>::infinity()};
    for (long long r = 0; r <= 2LL * resolution; ++r) {
        const long long step = base + r;
        const double d = static_cast<double>(step) / resolution;
        const auto shifted = dsp::resample_shift(captured.samples(), d, win.size(), win.begin);
        const Fit f = fit_gain(ref_win, shifted);
        if (f.residual < best_fit.residual) {
            best_fit = f;
            best_step = step;
        }
    }

    AlignmentResult out;
    out.resolution = resolution;
    out.integer_delay = floor_div(best_step, resolution);
    out.fractional_delay = static_cast<double>(best_step - out.integer_delay * resolution) / resolution;
    out.complex_gain = best_fit.gain;
    out.residual_nmse_db = to_db_clamped(best_fit.residual);
    return out;
}

ComplexWaveform apply_alignment(const ComplexWaveform& captured, const AlignmentResult& result,
                                std::size_t output_length) {
    if (result.complex_gain == cplx{}) throw UndefinedMetricError("alignment gain is zero");
    auto out = dsp::resample_shift(captured.samples(), result.delay(), output_length);
    const cplx inv = 1.0 / result.complex_gain;
    if (inv != cplx{1.0, 0.0})
        for (auto& v : out) v *= inv;
    return ComplexWaveform(std::move(out), captured.sample_rate());
}

} // namespace dpdlab
