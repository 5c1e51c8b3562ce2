// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dpdlab/waveform.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace dpdlab {

// Model of the analyzer capture path.
//
// Each real component is normalized by its own peak, z = |Re y| / max|Re y|,
// so z lies in [0, 1]. With peak-to-reference ratio rho > 1 the analyzer is
// modelled as companding z through
//
//     h(z) = log_rho((rho - 1) z + 1)
//
// before a uniform quantizer with Q + 1 cells on [0, 1]. The effective
// thresholds on z are d_q = (rho^{q/(Q+1)} - 1) / (rho - 1), q = 1..Q, and
// the steps d_{q+1} - d_q grow with q while shrinking with rho for small q:
// small amplitudes get finer cells, large amplitudes coarser ones. rho -> 1
// recovers the uniform thresholds q / (Q + 1).

enum class QuantizerMode { Uniform, Logarithmic };

std::string_view to_string(QuantizerMode m);
QuantizerMode parse_quantizer_mode(std::string_view name);

// Peak-to-reference ratio from decibels (amplitude ratio, 20 log10).
double rho_from_db(double db);

struct QuantizerSpec {
    int bits = 12;       // per real component, sign included
    double rho = 1.0;    // linear amplitude ratio, >= 1
    QuantizerMode mode = QuantizerMode::Uniform;
    bool enabled = true; // false: capture passes samples through untouched

    void validate() const;  // throws ConfigError
    // Q + 1 = 2^(bits-1) magnitude cells (one bit goes to the sign).
    std::uint64_t cells() const { return std::uint64_t{1} << (bits - 1); }
    std::uint64_t num_thresholds() const { return cells() - 1; }
    bool uniform_cells() const { return mode == QuantizerMode::Uniform || rho == 1.0; }
};

struct CaptureConfig {
    QuantizerSpec quantizer;
    std::optional<double> noise_snr_db;        // AWGN relative to signal power
    double fractional_delay_samples = 0.0;     // in [0, 1)
    std::optional<Rational> resample;          // output_rate / input_rate
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError
};

double compand(double z, double rho);
double expand(double u, double rho);

// d_1..d_Q; rho = 1 gives the uniform thresholds q / (Q + 1).
std::vector<double> thresholds(double rho, std::uint64_t q);
// delta_q = d_{q+1} - d_q for q = 1..Q-1.
std::vector<double> step_sizes(double rho, std::uint64_t q);
// All Q + 1 cell widths including [0, d_1) and [d_Q, 1].
std::vector<double> cell_widths(double rho, std::uint64_t q);

double quantize_magnitude(double z, const QuantizerSpec& spec);
std::vector<double> quantize_magnitude(std::span<const double> z, const QuantizerSpec& spec);

// AWGN -> fractional delay -> rational resampling -> per-component
// quantization. Deterministic for a given cfg.seed.
ComplexWaveform capture_chain(const ComplexWaveform& y, const CaptureConfig& cfg);

struct GroupMse {
    double low_mse;
    double high_mse;
};

// Sorts magnitudes, puts the lowest `split` fraction in the low group and the
// rest in the high group, and returns each group's mean squared
// quantization error.
GroupMse quantization_mse_by_percentile(std::span<const double> samples, const QuantizerSpec& spec,
                                        double split);

} // namespace dpdlab
