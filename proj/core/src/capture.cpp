// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/capture.hpp"

#include "dpdlab/dsp.hpp"
#include "dpdlab/error.hpp"
#include "dpdlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dpdlab {

std::string_view to_string(QuantizerMode m) {
    return m == QuantizerMode::Uniform ? "uniform" : "logarithmic";
}

QuantizerMode parse_quantizer_mode(std::string_view name) {
    if (name == "uniform") return QuantizerMode::Uniform;
    if (name == "logarithmic" || name == "log") return QuantizerMode::Logarithmic;
    throw ConfigError("unknown quantizer mode '" + std::string(name) + "'");
}

double rho_from_db(double db) { return std::pow(10.0, db / 20.0); }

void QuantizerSpec::validate() const {
    if (bits < 2 || bits > 53) throw ConfigError("quantizer bits must be in [2, 53]");
    if (!(rho >= 1.0) || !std::isfinite(rho)) throw ConfigError("quantizer rho must be >= 1");
}

void CaptureConfig::validate() const {
    quantizer.validate();
    if (!(fractional_delay_samples >= 0.0 && fractional_delay_samples < 1.0))
        throw ConfigError("capture fractional delay must be in [0, 1)");
    if (resample && (resample->num <= 0 || resample->den <= 0))
        throw ConfigError("capture resample ratio must be positive");
    if (noise_snr_db && !std::isfinite(*noise_snr_db)) throw ConfigError("capture SNR must be finite");
}

namespace {

void check_rho(double rho) {
    if (!(rho > 1.0) || !std::isfinite(rho)) throw DomainError("rho must be > 1 (got " + std::to_string(rho) + ")");
}

// rho^u - 1 without cancellation near rho = 1.
double pow_minus_one(double rho, double u) { return std::expm1(u * std::log1p(rho - 1.0)); }

double uniform_reconstruct(double z, double cells) {
    const double c = std::min(std::floor(z * cells), cells - 1.0);
    return (c + 0.5) / cells;
}

} // namespace

double compand(double z, double rho) {
    check_rho(rho);
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("compand input must lie in [0, 1]");
    return std::log1p((rho - 1.0) * z) / std::log1p(rho - 1.0);
}

double expand(double u, double rho) {
    check_rho(rho);
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("expand input must lie in [0, 1]");
    return pow_minus_one(rho, u) / (rho - 1.0);
}

std::vector<double> thresholds(double rho, std::uint64_t q) {
    if (q < 1) throw DomainError("need at least one threshold");
    const double cells = static_cast<double>(q) + 1.0;
    std::vector<double> d(q);
    if (rho == 1.0) {
        for (std::uint64_t i = 0; i < q; ++i) d[i] = static_cast<double>(i + 1) / cells;
        return d;
    }
    check_rho(rho);
    for (std::uint64_t i = 0; i < q; ++i)
        d[i] = pow_minus_one(rho, static_cast<double>(i + 1) / cells) / (rho - 1.0);
    return d;
}

std::vector<double> step_sizes(double rho, std::uint64_t q) {
    if (q < 2) throw DomainError("step sizes need Q >= 2");
    const double cells = static_cast<double>(q) + 1.0;
    if (rho == 1.0) return std::vector<double>(q - 1, 1.0 / cells);
    check_rho(rho);
    // d_{q+1} - d_q = rho^{q/(Q+1)} (rho^{1/(Q+1)} - 1) / (rho - 1), evaluated
    // without the cancellation of a direct difference.
    const double log_rho = std::log(rho);
    const double unit = std::expm1(log_rho / cells) / (rho - 1.0);
    std::vector<double> delta(q - 1);
    for (std::uint64_t i = 0; i + 1 < q; ++i) delta[i] = std::exp(log_rho * static_cast<double>(i + 1) / cells) * unit;
    return delta;
}

std::vector<double> cell_widths(double rho, std::uint64_t q) {
    const auto d = thresholds(rho, q);
    std::vector<double> w;
    w.reserve(q + 1);
    w.push_back(d.front());
    for (std::size_t i = 0; i + 1 < d.size(); ++i) w.push_back(d[i + 1] - d[i]);
    w.push_back(1.0 - d.back());
    return w;
}

double quantize_magnitude(double z, const QuantizerSpec& spec) {
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("quantizer input must lie in [0, 1]");
    if (!spec.enabled) return z;
    const double cells = static_cast<double>(spec.cells());
    if (spec.uniform_cells()) return uniform_reconstruct(z, cells);
    const double u = compand(z, spec.rho);
    return expand(uniform_reconstruct(u, cells), spec.rho);
}

std::vector<double> quantize_magnitude(std::span<const double> z, const QuantizerSpec& spec) {
    spec.validate();
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = quantize_magnitude(z[i], spec);
    return out;
}

ComplexWaveform capture_chain(const ComplexWaveform& y, const CaptureConfig& cfg) {
    cfg.validate();
    if (!(y.mean_power() > 0.0)) throw UndefinedMetricError("cannot capture an all-zero waveform");

    std::vector<cplx> s = y.vector();
    double rate = y.sample_rate();

    if (cfg.noise_snr_db) {
        Rng rng(cfg.seed);
        const double noise_power = y.mean_power() * std::pow(10.0, -*cfg.noise_snr_db / 10.0);
        for (auto& v : s) v += rng.complex_gaussian(noise_power);
    }
    if (cfg.fractional_delay_samples != 0.0) s = dsp::fractional_delay(s, cfg.fractional_delay_samples);
    if (cfg.resample && cfg.resample->num != cfg.resample->den) {
        s = dsp::resample_rational(s, cfg.resample->num, cfg.resample->den);
        rate *= cfg.resample->value();
        if (s.empty()) throw LengthError("resampled capture is empty");
    }

    if (cfg.quantizer.enabled) {
        double peak_re = 0.0, peak_im = 0.0;
        for (const auto& v : s) {
            peak_re = std::max(peak_re, std::abs(v.real()));
            peak_im = std::max(peak_im, std::abs(v.imag()));
        }
        const auto quantize_component = [&](double v, double peak) {
            if (peak == 0.0) return 0.0;
            const double z = std::min(std::abs(v) / peak, 1.0);
            return std::copysign(quantize_magnitude(z, cfg.quantizer) * peak, v);
        };
        for (auto& v : s) v = {quantize_component(v.real(), peak_re), quantize_component(v.imag(), peak_im)};
    }
    return ComplexWaveform(std::move(s), rate);
}

GroupMse quantization_mse_by_percentile(std::span<const double> samples, const QuantizerSpec& spec,
                                        double split) {
    spec.validate();
    if (!(split > 0.0 && split < 1.0)) throw DomainError("percentile split must lie in (0, 1)");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n_low = static_cast<std::size_t>(std::floor(split * static_cast<double>(sorted.size())));
    if (n_low == 0 || n_low == sorted.size())
        throw UndefinedMetricError("percentile split leaves an empty group");

    double low = 0.0, high = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double e = quantize_magnitude(sorted[i], spec) - sorted[i];
        (i < n_low ? low : high) += e * e;
    }
    return {low / static_cast<double>(n_low), high / static_cast<double>(sorted.size() - n_low)};
}

} // namespace dpdlab
