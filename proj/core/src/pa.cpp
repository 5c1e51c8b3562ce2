// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/pa.hpp"

#include "dpdlab/dsp.hpp"
#include "dpdlab/error.hpp"
#include "dpdlab/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

namespace dpdlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

} // namespace

void PaModel::validate() const {
    if (memory_fir.empty() || memory_fir.front() != cplx{1.0, 0.0})
        throw ConfigError("PA memory_fir must start with a unit tap");
    if (!(small_signal_gain > 1.0)) throw ConfigError("PA small-signal gain must exceed 1");
    std::visit(overloaded{
                   [](const RappAmAm& r) {
                       if (!(r.saturation > 0.0) || !(r.smoothness > 0.0))
                           throw ConfigError("Rapp saturation and smoothness must be positive");
                   },
                   [](const SalehAmAm& s) {
                       if (!(s.alpha > 0.0) || !(s.beta >= 0.0))
                           throw ConfigError("Saleh AM-AM needs alpha > 0 and beta >= 0");
                   }},
               amam);
    if (const auto* p = std::get_if<SalehAmPm>(&ampm); p && !(p->beta >= 0.0))
        throw ConfigError("Saleh AM-PM beta must be non-negative");
}

double PaModel::saturation_amplitude() const {
    return std::visit(overloaded{
                          [](const RappAmAm& r) { return r.saturation; },
                          [](const SalehAmAm& s) { return s.beta > 0.0 ? 1.0 / std::sqrt(s.beta) : 1.0; }},
                      amam);
}

PaPreset parse_pa_preset(std::string_view name) {
    if (name == "mild") return PaPreset::Mild;
    if (name == "testbed_like") return PaPreset::TestbedLike;
    throw ConfigError("unknown PA preset '" + std::string(name) + "'");
}

PaModel make_reference_pa(PaPreset preset) {
    PaModel m;
    switch (preset) {
    case PaPreset::Mild:
        m.memory_fir = {1.0};
        m.amam = RappAmAm{10.0, 2.0};
        m.ampm = NoAmPm{};
        m.small_signal_gain = 10.0;
        break;
    case PaPreset::TestbedLike:
        m.memory_fir = {1.0, std::polar(0.15, std::numbers::pi / 6.0), std::polar(0.05, -std::numbers::pi / 4.0)};
        m.amam = RappAmAm{std::pow(10.0, 10.0 / 20.0), 2.0};
        m.ampm = SalehAmPm{0.5, 2.0};
        m.small_signal_gain = 10.0;
        break;
    }
    return m;
}

ComplexWaveform apply_pa(const PaModel& model, const ComplexWaveform& x) {
    model.validate();
    std::vector<cplx> u = model.memory_fir.size() == 1 ? x.vector() : dsp::convolve_same(x.samples(), model.memory_fir);

    const double g = model.small_signal_gain;
    const auto amam = [&](double a) {
        return std::visit(overloaded{
                              [a](const RappAmAm& r) {
                                  const double p2 = 2.0 * r.smoothness;
                                  return a / std::pow(1.0 + std::pow(a / r.saturation, p2), 1.0 / p2);
                              },
                              [a](const SalehAmAm& s) { return s.alpha * a / (1.0 + s.beta * a * a); }},
                          model.amam);
    };
    const auto* pm = std::get_if<SalehAmPm>(&model.ampm);

    for (auto& v : u) {
        const double a = std::abs(v);
        if (a == 0.0) {
            v = 0.0;
            continue;
        }
        double out = g * amam(a);
        cplx unit = v / a;
        if (pm) unit *= std::polar(1.0, pm->alpha * a * a / (1.0 + pm->beta * a * a));
        v = out * unit;
    }

    if (!model.post_fir.empty()) u = dsp::convolve_same(u, model.post_fir);
    return x.with_samples(std::move(u));
}

cplx estimate_small_signal_gain(const PaModel& model, std::uint64_t probe_seed) {
    model.validate();
    constexpr std::size_t kProbeLen = 8192;
    const double rms = model.saturation_amplitude() / 100.0;
    Rng rng(probe_seed);
    std::vector<cplx> probe(kProbeLen);
    for (auto& v : probe) v = rng.complex_gaussian(rms * rms);
    const ComplexWaveform in(std::move(probe), 1.0);
    const auto out = apply_pa(model, in);

    // LS fit out[n] ~ sum_l c_l in[n-l] over the combined memory span.
    const std::size_t taps = model.memory_fir.size() + (model.post_fir.empty() ? 0 : model.post_fir.size() - 1);
    const auto rows = static_cast<Eigen::Index>(kProbeLen - taps + 1);
    Eigen::MatrixXcd a(rows, static_cast<Eigen::Index>(taps));
    Eigen::VectorXcd b(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t n = static_cast<std::size_t>(r) + taps - 1;
        for (std::size_t l = 0; l < taps; ++l) a(r, static_cast<Eigen::Index>(l)) = in[n - l];
        b(r) = out[n];
    }
    const Eigen::VectorXcd c = a.colPivHouseholderQr().solve(b);
    return c(0);
}

} // namespace dpdlab
