// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/waveform.hpp"

#include "dpdlab/dsp.hpp"
#include "dpdlab/error.hpp"
#include "dpdlab/fft.hpp"
#include "dpdlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dpdlab {

ComplexWaveform::ComplexWaveform(std::vector<cplx> samples, double sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
    if (samples_.empty()) throw ShapeError("waveform must not be empty");
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_))
        throw DomainError("waveform sample rate must be positive and finite");
    for (const auto& v : samples_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw DomainError("waveform contains a non-finite sample");
    }
}

double ComplexWaveform::mean_power() const noexcept { return dsp::mean_power(samples_); }

double ComplexWaveform::rms() const noexcept { return std::sqrt(mean_power()); }

ComplexWaveform ComplexWaveform::scaled(cplx factor) const {
    std::vector<cplx> out(samples_);
    for (auto& v : out) v *= factor;
    return ComplexWaveform(std::move(out), sample_rate_);
}

std::string_view to_string(Constellation c) {
    switch (c) {
    case Constellation::Qpsk: return "qpsk";
    case Constellation::Qam16: return "qam16";
    case Constellation::Qam64: return "qam64";
    case Constellation::Qam256: return "qam256";
    }
    return "unknown";
}

Constellation parse_constellation(std::string_view name) {
    if (name == "qpsk") return Constellation::Qpsk;
    if (name == "qam16") return Constellation::Qam16;
    if (name == "qam64") return Constellation::Qam64;
    if (name == "qam256") return Constellation::Qam256;
    throw ConfigError("unknown constellation '" + std::string(name) + "'");
}

namespace {

int levels_per_axis(Constellation c) {
    switch (c) {
    case Constellation::Qpsk: return 2;
    case Constellation::Qam16: return 4;
    case Constellation::Qam64: return 8;
    case Constellation::Qam256: return 16;
    }
    return 2;
}

// Scale that gives unit average power for an LxL square grid on odd integers.
double qam_scale(int levels) {
    const double m = static_cast<double>(levels) * levels;
    return 1.0 / std::sqrt(2.0 * (m - 1.0) / 3.0);
}

std::size_t bin_of(int index, std::size_t size) {
    const auto n = static_cast<long long>(size);
    return static_cast<std::size_t>(((index % n) + n) % n);
}

} // namespace

std::vector<cplx> constellation_points(Constellation c) {
    const int levels = levels_per_axis(c);
    const double scale = qam_scale(levels);
    std::vector<cplx> pts;
    pts.reserve(static_cast<std::size_t>(levels * levels));
    for (int i = 0; i < levels; ++i)
        for (int q = 0; q < levels; ++q)
            pts.emplace_back(scale * (2 * i - levels + 1), scale * (2 * q - levels + 1));
    return pts;
}

bool is_constellation_point(Constellation c, cplx value, double tol) {
    const int levels = levels_per_axis(c);
    const double scale = qam_scale(levels);
    auto on_axis = [&](double v) {
        const double u = v / scale;  // should be an odd integer in range
        const double r = std::round((u + levels - 1) / 2.0);
        if (r < 0 || r > levels - 1) return false;
        return std::abs(u - (2.0 * r - levels + 1)) * scale <= tol;
    };
    return on_axis(value.real()) && on_axis(value.imag());
}

void OfdmConfig::validate() const {
    if (fft_size < 2) throw ConfigError("fft_size must be at least 2");
    if (occupied_subcarriers == 0) throw ConfigError("occupied_subcarriers must be positive");
    if (occupied_subcarriers >= fft_size)
        throw ConfigError("occupied_subcarriers must be smaller than fft_size (guard band)");
    if (num_symbols == 0) throw ConfigError("num_symbols must be positive");
    if (oversampling.num <= 0 || oversampling.den <= 0)
        throw ConfigError("oversampling factor must be a positive ratio");
    if (oversampling.num < oversampling.den) throw ConfigError("oversampling factor must be >= 1");
    if ((fft_size * static_cast<std::size_t>(oversampling.num)) % static_cast<std::size_t>(oversampling.den) != 0)
        throw ConfigError("fft_size * oversampling must be an integer");
    if ((cyclic_prefix_len * static_cast<std::size_t>(oversampling.num)) % static_cast<std::size_t>(oversampling.den) != 0)
        throw ConfigError("cyclic_prefix_len * oversampling must be an integer");
    if (cyclic_prefix_len > fft_size) throw ConfigError("cyclic prefix longer than the symbol");
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) throw ConfigError("bandwidth must be positive");
    if (edge_taper_len > cyclic_prefix_samples()) throw ConfigError("edge taper longer than the cyclic prefix");
}

std::size_t OfdmConfig::synthesis_size() const {
    return fft_size * static_cast<std::size_t>(oversampling.num) / static_cast<std::size_t>(oversampling.den);
}

std::size_t OfdmConfig::cyclic_prefix_samples() const {
    return cyclic_prefix_len * static_cast<std::size_t>(oversampling.num) / static_cast<std::size_t>(oversampling.den);
}

std::size_t OfdmConfig::symbol_samples() const { return synthesis_size() + cyclic_prefix_samples(); }

std::size_t OfdmConfig::total_samples() const { return symbol_samples() * num_symbols; }

double OfdmConfig::sample_rate() const {
    const double spacing = bandwidth_hz / static_cast<double>(occupied_subcarriers);
    return spacing * static_cast<double>(fft_size) * oversampling.value();
}

std::vector<int> OfdmConfig::subcarrier_indices() const {
    const int k = static_cast<int>(occupied_subcarriers);
    const int neg = k / 2;
    std::vector<int> idx;
    idx.reserve(occupied_subcarriers);
    for (int i = -neg; i < 0; ++i) idx.push_back(i);
    for (int i = 1; i <= k - neg; ++i) idx.push_back(i);
    return idx;
}

ComplexWaveform synthesize_ofdm(const GridReference& grid, const OfdmConfig& cfg) {
    cfg.validate();
    if (grid.num_symbols != cfg.num_symbols || grid.num_subcarriers() != cfg.occupied_subcarriers ||
        grid.data_symbols.size() != grid.num_symbols * grid.num_subcarriers())
        throw ShapeError("grid does not match the OFDM configuration");

    const std::size_t m = cfg.synthesis_size();
    const std::size_t cp = cfg.cyclic_prefix_samples();
    const std::size_t taper = cfg.edge_taper_len;
    const std::size_t sym_len = cfg.symbol_samples();
    const double unitary = std::sqrt(static_cast<double>(m));

    std::vector<double> ramp(taper);
    for (std::size_t i = 0; i < taper; ++i)
        ramp[i] = 0.5 - 0.5 * std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(taper));

    std::vector<cplx> out(cfg.total_samples() + taper);
    std::vector<cplx> bins(m);
    for (std::size_t s = 0; s < grid.num_symbols; ++s) {
        std::fill(bins.begin(), bins.end(), cplx{});
        for (std::size_t k = 0; k < grid.num_subcarriers(); ++k)
            bins[bin_of(grid.subcarrier_indices[k], m)] = grid.at(s, k);
        auto body = ifft(bins);
        for (auto& v : body) v *= unitary;
        // [CP | body | suffix], ramps on the first and last `taper` samples.
        cplx* dst = out.data() + s * sym_len;
        for (std::size_t i = 0; i < sym_len + taper; ++i) {
            double w = 1.0;
            if (i < taper) w = ramp[i];
            else if (i >= sym_len) w = ramp[sym_len + taper - 1 - i];
            dst[i] += w * body[(i + m - cp) % m];
        }
    }
    out.resize(cfg.total_samples());
    return ComplexWaveform(std::move(out), cfg.sample_rate());
}

std::pair<ComplexWaveform, GridReference> generate_ofdm(const OfdmConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const auto points = constellation_points(cfg.constellation);
    Rng rng(seed);

    GridReference grid;
    grid.num_symbols = cfg.num_symbols;
    grid.subcarrier_indices = cfg.subcarrier_indices();
    grid.data_symbols.resize(cfg.num_symbols * cfg.occupied_subcarriers);
    for (auto& v : grid.data_symbols) v = points[rng.uniform_index(points.size())];

    auto w = normalize_rms(synthesize_ofdm(grid, cfg), 1.0);
    return {std::move(w), std::move(grid)};
}

std::vector<cplx> demodulate_ofdm(std::span<const cplx> samples, const OfdmConfig& cfg) {
    cfg.validate();
    if (samples.size() < cfg.total_samples())
        throw LengthError("capture shorter than the OFDM frame");
    const std::size_t m = cfg.synthesis_size();
    const std::size_t cp = cfg.cyclic_prefix_samples();
    const auto idx = cfg.subcarrier_indices();
    const double unitary = 1.0 / std::sqrt(static_cast<double>(m));

    std::vector<cplx> out;
    out.reserve(cfg.num_symbols * idx.size());
    for (std::size_t s = 0; s < cfg.num_symbols; ++s) {
        const auto body = samples.subspan(s * cfg.symbol_samples() + cp, m);
        const auto spec = fft(body);
        for (int k : idx) out.push_back(spec[bin_of(k, m)] * unitary);
    }
    return out;
}

double measure_papr(const ComplexWaveform& w) {
    double peak = 0.0;
    for (const auto& v : w.samples()) peak = std::max(peak, std::norm(v));
    const double mean = w.mean_power();
    if (!(mean > 0.0)) throw UndefinedMetricError("PAPR undefined for an all-zero waveform");
    return std::max(0.0, 10.0 * std::log10(peak / mean));
}

ComplexWaveform normalize_rms(const ComplexWaveform& w, double target_rms) {
    if (!(target_rms > 0.0)) throw DomainError("target RMS must be positive");
    const double rms = w.rms();
    if (!(rms > 0.0)) throw UndefinedMetricError("cannot normalize a zero-power waveform");
    return w.scaled(target_rms / rms);
}

} // namespace dpdlab
