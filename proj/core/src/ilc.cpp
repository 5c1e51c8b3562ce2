// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/ilc.hpp"

#include "dpdlab/error.hpp"
#include "dpdlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dpdlab {

std::string_view to_string(UpdateMode m) { return m == UpdateMode::Linear ? "linear" : "gain_inverse"; }

UpdateMode parse_update_mode(std::string_view name) {
    if (name == "linear") return UpdateMode::Linear;
    if (name == "gain_inverse") return UpdateMode::GainInverse;
    throw ConfigError("unknown ILC update mode '" + std::string(name) + "'");
}

void IlcConfig::validate() const {
    if (max_iterations < 1) throw ConfigError("ilc.max_iterations must be >= 1");
    if (!(step_mu > 0.0 && step_mu <= 1.0)) throw ConfigError("ilc.step_mu must lie in (0, 1]");
    if (!(gain_inverse_floor >= 0.0)) throw ConfigError("ilc.gain_inverse_floor must be non-negative");
}

ComplexWaveform ilc_step(const ComplexWaveform& x, const ComplexWaveform& y_hat, const ComplexWaveform& s,
                         const IlcConfig& cfg) {
    if (x.size() != s.size() || y_hat.size() != s.size())
        throw ShapeError("ilc_step needs x, y_hat and s of equal length");
    std::vector<cplx> next(x.size());
    const double mu = cfg.step_mu;
    if (cfg.update_mode == UpdateMode::Linear) {
        for (std::size_t n = 0; n < next.size(); ++n) next[n] = x[n] + mu * (s[n] - y_hat[n]);
    } else {
        const double floor = cfg.gain_inverse_floor * s.rms();
        for (std::size_t n = 0; n < next.size(); ++n) {
            if (std::abs(y_hat[n]) >= floor && y_hat[n] != cplx{})
                next[n] = x[n] * (s[n] / y_hat[n]);
            else
                next[n] = x[n] + mu * (s[n] - y_hat[n]);
        }
    }
    return x.with_samples(std::move(next));
}

IlcResult ilc_run(const ComplexWaveform& s, const Plant& plant, const IlcConfig& cfg, int align_resolution) {
    cfg.validate();
    const std::size_t n = s.size();
    const SampleRange metric_range = guarded_range(n);

    ComplexWaveform x = s;
    IlcResult result{x, {}, {}, cplx{1.0, 0.0}, AlignmentResult{}, 0, false};
    SampleRange covered{0, n};

    for (int i = 0; i < cfg.max_iterations; ++i) {
        if (cfg.store_trajectory) result.per_iteration_inputs.push_back(x);
        const ComplexWaveform y = plant(x);
        if (!(y.mean_power() > 0.0)) throw PlantError("plant returned a zero-power waveform");

        if (i == 0) {
            result.alignment = estimate_delay(s, y, align_resolution);
            result.estimated_gain = result.alignment.complex_gain;
            // Output samples whose source position lies inside the capture.
            const double d = result.alignment.delay();
            const auto lo = static_cast<long long>(std::ceil(-d));
            const double last = static_cast<double>(y.size() - 1) - d;
            const auto hi = static_cast<long long>(result.alignment.fractional_delay == 0.0 ? std::floor(last)
                                                                                            : std::ceil(last) - 1.0);
            covered.begin = static_cast<std::size_t>(std::clamp<long long>(lo, 0, static_cast<long long>(n)));
            covered.end = static_cast<std::size_t>(std::clamp<long long>(hi + 1, 0, static_cast<long long>(n)));
        }
        const ComplexWaveform y_hat = apply_alignment(y, result.alignment, n);

        const double e = nmse(s.samples().subspan(metric_range.begin, metric_range.size()),
                              y_hat.samples().subspan(metric_range.begin, metric_range.size()));
        result.per_iteration_nmse_db.push_back(e);
        result.iterations = i + 1;
        if (e <= cfg.convergence_nmse_db) {
            result.converged = true;
            break;
        }

        ComplexWaveform next = ilc_step(x, y_hat, s, cfg);
        if (covered.begin > 0 || covered.end < n) {
            std::vector<cplx> merged = next.vector();
            for (std::size_t k = 0; k < covered.begin; ++k) merged[k] = x[k];
            for (std::size_t k = covered.end; k < n; ++k) merged[k] = x[k];
            next = x.with_samples(std::move(merged));
        }
        x = std::move(next);
    }
    result.final_input = std::move(x);
    return result;
}

} // namespace dpdlab
