// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dpdlab/waveform.hpp"

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace dpdlab {

// Rapp solid-state AM-AM: a / (1 + (a/sat)^{2p})^{1/(2p)}.
struct RappAmAm {
    double saturation = 1.0;
    double smoothness = 2.0;
};

// Saleh AM-AM: alpha * a / (1 + beta * a^2).
struct SalehAmAm {
    double alpha = 1.0;
    double beta = 1.0;
};

struct NoAmPm {};

// Saleh AM-PM in radians: alpha * a^2 / (1 + beta * a^2).
struct SalehAmPm {
    double alpha = 0.0;
    double beta = 1.0;
};

// Wiener-Hammerstein style PA: memory FIR -> static AM-AM/AM-PM (times G) ->
// optional post FIR.
struct PaModel {
    std::vector<cplx> memory_fir{cplx{1.0, 0.0}};
    std::variant<RappAmAm, SalehAmAm> amam{RappAmAm{}};
    std::variant<NoAmPm, SalehAmPm> ampm{NoAmPm{}};
    double small_signal_gain = 10.0;
    std::vector<cplx> post_fir;  // empty: absent

    void validate() const;  // throws ConfigError
    // Amplitude scale of the nonlinearity (Rapp saturation, or 1/sqrt(beta)
    // for Saleh); used to size low-level probes.
    double saturation_amplitude() const;
};

enum class PaPreset { Mild, TestbedLike };

PaPreset parse_pa_preset(std::string_view name);

// mild: memoryless Rapp(sat 10, p 2), G 10, no AM-PM (20 dB above unit RMS).
// testbed_like: FIR [1, 0.15 e^{j pi/6}, 0.05 e^{-j pi/4}], Rapp(sat sqrt(10),
// p 2), Saleh AM-PM(0.5, 2), G 10.
PaModel make_reference_pa(PaPreset preset);

ComplexWaveform apply_pa(const PaModel& model, const ComplexWaveform& x);

// Complex lag-0 gain from a low-level Gaussian probe (RMS = saturation/100).
// Fits a short FIR covering the model's memory so the lag-0 tap is not biased
// by the other taps.
cplx estimate_small_signal_gain(const PaModel& model, std::uint64_t probe_seed = 0);

} // namespace dpdlab
