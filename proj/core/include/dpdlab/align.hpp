// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dpdlab/waveform.hpp"

#include <cstddef>

namespace dpdlab {

// Samples at each end of an aligned waveform that metrics ignore; sinc
// interpolation and zero fill make them unreliable.
inline constexpr std::size_t kGuardSamples = 64;

inline constexpr int kDefaultFractionalResolution = 32;
inline constexpr int kMaxFractionalResolution = 512;

// captured(n) ~= complex_gain * reference(n - delay()).
struct AlignmentResult {
    long long integer_delay = 0;
    double fractional_delay = 0.0;  // multiple of 1/resolution, in [0, 1)
    int resolution = kDefaultFractionalResolution;
    cplx complex_gain{1.0, 0.0};
    double residual_nmse_db = -200.0;

    double delay() const { return static_cast<double>(integer_delay) + fractional_delay; }
};

// Integer lag from the cross-correlation peak, then an exhaustive search over
// `resolution` fractional offsets per sample (two samples around the peak),
// scoring each by the residual after a least-squares complex gain. Throws
// AmbiguityError when a second correlation peak is within 0.1 dB of the first.
AlignmentResult estimate_delay(const ComplexWaveform& reference, const ComplexWaveform& captured,
                               int resolution = kDefaultFractionalResolution);

// Undo delay and gain; output has `output_length` samples, zero where the
// shifted position falls outside the capture.
ComplexWaveform apply_alignment(const ComplexWaveform& captured, const AlignmentResult& result,
                                std::size_t output_length);

inline ComplexWaveform apply_alignment(const ComplexWaveform& captured, const AlignmentResult& result) {
    return apply_alignment(captured, result, captured.size());
}

// Trims kGuardSamples from both ends when the record is long enough to
// spare them; otherwise returns the input range unchanged.
struct SampleRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};
SampleRange guarded_range(std::size_t length, std::size_t guard = kGuardSamples);

} // namespace dpdlab
