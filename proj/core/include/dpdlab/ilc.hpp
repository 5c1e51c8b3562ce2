// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dpdlab/align.hpp"
#include "dpdlab/waveform.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace dpdlab {

enum class UpdateMode { Linear, GainInverse };

std::string_view to_string(UpdateMode m);
UpdateMode parse_update_mode(std::string_view name);

struct IlcConfig {
    int max_iterations = 10;
    double step_mu = 0.5;
    UpdateMode update_mode = UpdateMode::Linear;
    double convergence_nmse_db = -200.0;  // stop once feedback NMSE <= this
    double gain_inverse_floor = 0.01;     // min |y_hat| as a fraction of RMS(s)
    bool store_trajectory = false;

    void validate() const;  // throws ConfigError
};

// Plant under linearization: PA followed by the capture path.
using Plant = std::function<ComplexWaveform(const ComplexWaveform&)>;

struct IlcResult {
    ComplexWaveform final_input;
    std::vector<double> per_iteration_nmse_db;   // feedback NMSE of x_0..x_{k-1}
    std::vector<ComplexWaveform> per_iteration_inputs;  // when store_trajectory
    cplx estimated_gain{1.0, 0.0};
    AlignmentResult alignment;
    int iterations = 0;
    bool converged = false;
};

// One update. Linear: x + mu (s - y_hat). GainInverse: x * s / y_hat where
// |y_hat| >= floor * RMS(s), the linear rule elsewhere. y_hat is the aligned,
// gain-normalized capture.
ComplexWaveform ilc_step(const ComplexWaveform& x, const ComplexWaveform& y_hat, const ComplexWaveform& s,
                         const IlcConfig& cfg);

// x_0 = s; each pass captures y_i = plant(x_i), aligns it (delay and gain
// estimated on the first pass and reused), records NMSE(s, y_hat_i) over the
// guarded range and updates. Samples the aligned capture cannot cover keep
// their previous drive.
IlcResult ilc_run(const ComplexWaveform& s, const Plant& plant, const IlcConfig& cfg,
                  int align_resolution = kDefaultFractionalResolution);

} // namespace dpdlab
