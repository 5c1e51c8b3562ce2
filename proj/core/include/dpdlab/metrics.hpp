// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dpdlab/waveform.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace dpdlab {

inline constexpr double kMetricFloorDb = -200.0;

// 10 log10(sum |test - ref|^2 / sum |ref|^2), clamped at -200 dB. Both inputs
// must already be aligned and gain-normalized.
double nmse(std::span<const cplx> reference, std::span<const cplx> test);
inline double nmse(const ComplexWaveform& reference, const ComplexWaveform& test) {
    return nmse(reference.samples(), test.samples());
}

// Subcarrier EVM after per-subcarrier single-tap least-squares equalization
// across symbols. `captured` must start on the first symbol's CP.
double evm_subcarrier(const GridReference& grid, const ComplexWaveform& captured, const OfdmConfig& cfg);

enum class PsdWindow { Hann };
enum class PsdNormalization { PeakZeroDb };

struct PsdConfig {
    std::size_t segment_len = 4096;
    double overlap_fraction = 0.5;
    PsdWindow window = PsdWindow::Hann;
    PsdNormalization normalization = PsdNormalization::PeakZeroDb;
};

struct Psd {
    std::vector<double> freq_hz;   // ascending, centred on 0
    std::vector<double> level_db;  // peak at 0 dB
    // Sum of the un-normalized bin powers; equals the waveform's mean power
    // for a consistent Welch estimate.
    double total_power = 0.0;
};

Psd psd(const ComplexWaveform& w, const PsdConfig& cfg = {});

struct AmAmPoint {
    double input_amplitude;
    double output_amplitude;
    double phase_delta;  // arg(y) - arg(x), wrapped to (-pi, pi]
};

// Samples with |x| < 1e-6 * RMS(x) are dropped (phase undefined).
std::vector<AmAmPoint> amam_ampm(const ComplexWaveform& x, const ComplexWaveform& y);

// Mean over amplitude bins in [lo, hi) of the standard deviation of output
// amplitude within the bin. Zero for a memoryless curve sampled at repeated
// input amplitudes; grows with memory effects.
double amam_scatter_width(std::span<const AmAmPoint> points, double lo, double hi, std::size_t bins);

} // namespace dpdlab
