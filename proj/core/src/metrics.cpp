// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/metrics.hpp"

#include "dpdlab/error.hpp"
#include "dpdlab/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dpdlab {

namespace {

double ratio_db(double num, double den) {
    if (!(num > 0.0)) return kMetricFloorDb;
    return std::max(kMetricFloorDb, 10.0 * std::log10(num / den));
}

// Above this the demodulator is not looking at symbol boundaries.
constexpr double kMisalignedEvmDb = -3.0;

} // namespace

double nmse(std::span<const cplx> reference, std::span<const cplx> test) {
    if (reference.size() != test.size()) throw ShapeError("nmse inputs differ in length");
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        err += std::norm(test[i] - reference[i]);
        ref += std::norm(reference[i]);
    }
    if (!(ref > 0.0)) throw UndefinedMetricError("nmse undefined for a zero reference");
    return ratio_db(err, ref);
}

double evm_subcarrier(const GridReference& grid, const ComplexWaveform& captured, const OfdmConfig& cfg) {
    cfg.validate();
    if (grid.num_symbols != cfg.num_symbols || grid.num_subcarriers() != cfg.occupied_subcarriers)
        throw ShapeError("grid does not match the OFDM configuration");
    const auto rx = demodulate_ofdm(captured.samples(), cfg);
    const std::size_t nk = grid.num_subcarriers();

    double err = 0.0, sig = 0.0;
    for (std::size_t k = 0; k < nk; ++k) {
        cplx cross{};
        double energy = 0.0;
        for (std::size_t s = 0; s < grid.num_symbols; ++s) {
            const cplx r = grid.at(s, k);
            cross += std::conj(r) * rx[s * nk + k];
            energy += std::norm(r);
        }
        const cplx c = cross / energy;
        for (std::size_t s = 0; s < grid.num_symbols; ++s) {
            const cplx ideal = c * grid.at(s, k);
            err += std::norm(rx[s * nk + k] - ideal);
            sig += std::norm(ideal);
        }
    }
    if (!(sig > 0.0)) throw AlignmentError("EVM equalizer found no signal; capture misaligned");
    const double evm = ratio_db(err, sig);
    if (evm > kMisalignedEvmDb) throw AlignmentError("EVM above -3 dB; capture is not on symbol boundaries");
    return evm;
}

Psd psd(const ComplexWaveform& w, const PsdConfig& cfg) {
    const std::size_t len = cfg.segment_len;
    if (len == 0) throw DomainError("PSD segment length must be positive");
    if (!(cfg.overlap_fraction >= 0.0 && cfg.overlap_fraction < 1.0))
        throw DomainError("PSD overlap must lie in [0, 1)");
    if (w.size() < len) throw LengthError("waveform shorter than one PSD segment");

    std::vector<double> window(len);
    double window_energy = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
        window_energy += window[i] * window[i];
    }
    const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(len) * (1.0 - cfg.overlap_fraction))));

    std::vector<double> acc(len, 0.0);
    std::size_t segments = 0;
    std::vector<cplx> seg(len);
    for (std::size_t start = 0; start + len <= w.size(); start += hop) {
        for (std::size_t i = 0; i < len; ++i) seg[i] = w[start + i] * window[i];
        const auto spec = fft(seg);
        for (std::size_t k = 0; k < len; ++k) acc[k] += std::norm(spec[k]);
        ++segments;
    }

    const double scale = 1.0 / (static_cast<double>(segments) * static_cast<double>(len) * window_energy);
    Psd out;
    out.freq_hz.resize(len);
    out.level_db.resize(len);
    std::vector<double> shifted(len);
    const auto half = static_cast<long long>(len / 2);
    const auto n = static_cast<long long>(len);
    double peak = 0.0;
    for (long long j = 0; j < n; ++j) {
        const long long k = j - half;
        const auto bin = static_cast<std::size_t>(((k % n) + n) % n);
        shifted[static_cast<std::size_t>(j)] = acc[bin] * scale;
        out.freq_hz[static_cast<std::size_t>(j)] = static_cast<double>(k) * w.sample_rate() / static_cast<double>(len);
        out.total_power += acc[bin] * scale;
        peak = std::max(peak, acc[bin] * scale);
    }
    for (std::size_t j = 0; j < len; ++j)
        out.level_db[j] = peak > 0.0 && shifted[j] > 0.0 ? 10.0 * std::log10(shifted[j] / peak) : -300.0;
    return out;
}

std::vector<AmAmPoint> amam_ampm(const ComplexWaveform& x, const ComplexWaveform& y) {
    if (x.size() != y.size()) throw ShapeError("AM-AM inputs differ in length");
    const double threshold = 1e-6 * x.rms();
    std::vector<AmAmPoint> out;
    out.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::abs(x[i]);
        if (a < threshold || a == 0.0) continue;
        double phase = std::arg(y[i] * std::conj(x[i]));
        if (phase <= -std::numbers::pi) phase = std::numbers::pi;
        out.push_back({a, std::abs(y[i]), phase});
    }
    return out;
}

double amam_scatter_width(std::span<const AmAmPoint> points, double lo, double hi, std::size_t bins) {
    if (!(hi > lo) || bins == 0) throw DomainError("scatter width needs hi > lo and bins > 0");
    // Welford accumulators per bin.
    std::vector<double> mean(bins, 0.0), m2(bins, 0.0);
    std::vector<std::size_t> count(bins, 0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (const auto& p : points) {
        if (p.input_amplitude < lo || p.input_amplitude >= hi) continue;
        const auto b = std::min(bins - 1, static_cast<std::size_t>((p.input_amplitude - lo) / width));
        ++count[b];
        const double delta = p.output_amplitude - mean[b];
        mean[b] += delta / static_cast<double>(count[b]);
        m2[b] += delta * (p.output_amplitude - mean[b]);
    }
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t b = 0; b < bins; ++b) {
        if (count[b] < 2) continue;
        total += std::sqrt(m2[b] / static_cast<double>(count[b]));
        ++used;
    }
    if (used == 0) throw UndefinedMetricError("no amplitude bin holds two or more points");
    return total / static_cast<double>(used);
}

} // namespace dpdlab
