// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace dpdlab {

using cplx = std::complex<double>;

// Complex baseband samples plus their sample rate. Non-empty and finite by
// construction; every waveform in the library travels as one of these.
class ComplexWaveform {
public:
    ComplexWaveform(std::vector<cplx> samples, double sample_rate);

    std::span<const cplx> samples() const noexcept { return samples_; }
    const std::vector<cplx>& vector() const noexcept { return samples_; }
    double sample_rate() const noexcept { return sample_rate_; }
    std::size_t size() const noexcept { return samples_.size(); }
    const cplx& operator[](std::size_t i) const noexcept { return samples_[i]; }

    double mean_power() const noexcept;
    double rms() const noexcept;

    // Same sample rate, new samples (validated).
    ComplexWaveform with_samples(std::vector<cplx> samples) const {
        return ComplexWaveform(std::move(samples), sample_rate_);
    }
    ComplexWaveform scaled(cplx factor) const;

    friend bool operator==(const ComplexWaveform&, const ComplexWaveform&) = default;

private:
    std::vector<cplx> samples_;
    double sample_rate_;
};

enum class Constellation { Qpsk, Qam16, Qam64, Qam256 };

std::string_view to_string(Constellation c);
Constellation parse_constellation(std::string_view name);

// Unit-average-power points of a square constellation, row-major over (I, Q).
std::vector<cplx> constellation_points(Constellation c);
bool is_constellation_point(Constellation c, cplx value, double tol = 1e-9);

struct Rational {
    int num = 1;
    int den = 1;
    double value() const { return static_cast<double>(num) / den; }
    friend bool operator==(const Rational&, const Rational&) = default;
};

// Generic OFDM numerology. Subcarrier spacing is bandwidth / occupied, the
// critically sampled rate is fft_size * spacing and the emitted rate is that
// times the oversampling factor. Defaults mirror a 1.5x DAC/ADC ratio.
struct OfdmConfig {
    std::size_t fft_size = 1024;
    std::size_t occupied_subcarriers = 800;
    std::size_t num_symbols = 20;
    std::size_t cyclic_prefix_len = 64;
    Constellation constellation = Constellation::Qam256;
    Rational oversampling{3, 2};
    double bandwidth_hz = 320e6;
    // Raised-cosine symbol edge taper, in output samples. Each symbol is
    // extended by this many cyclic-suffix samples that overlap the start of
    // the next CP; the FFT window is untouched. Must not exceed the CP.
    std::size_t edge_taper_len = 16;

    void validate() const;  // throws ConfigError

    std::size_t synthesis_size() const;      // IDFT length after oversampling
    std::size_t cyclic_prefix_samples() const;
    std::size_t symbol_samples() const;      // CP + body
    std::size_t total_samples() const;
    double sample_rate() const;
    // Signed subcarrier indices, negative half first, DC excluded.
    std::vector<int> subcarrier_indices() const;

    friend bool operator==(const OfdmConfig&, const OfdmConfig&) = default;
};

// Transmitted constellation grid, row-major [symbol][subcarrier].
struct GridReference {
    std::size_t num_symbols = 0;
    std::vector<int> subcarrier_indices;
    std::vector<cplx> data_symbols;

    std::size_t num_subcarriers() const { return subcarrier_indices.size(); }
    const cplx& at(std::size_t symbol, std::size_t k) const {
        return data_symbols[symbol * subcarrier_indices.size() + k];
    }
};

// Unitary IDFT synthesis of a grid, with CP and oversampling, no RMS scaling.
ComplexWaveform synthesize_ofdm(const GridReference& grid, const OfdmConfig& cfg);

// Random constellation grid from `seed`, synthesized and normalized to RMS 1.
std::pair<ComplexWaveform, GridReference> generate_ofdm(const OfdmConfig& cfg, std::uint64_t seed);

// Strip CP and DFT each symbol; returns the occupied bins, row-major like
// GridReference::data_symbols. Inverse of synthesize_ofdm.
std::vector<cplx> demodulate_ofdm(std::span<const cplx> samples, const OfdmConfig& cfg);

double measure_papr(const ComplexWaveform& w);
ComplexWaveform normalize_rms(const ComplexWaveform& w, double target_rms);

// Binary waveform file: "ILCWAVE1", u64 count, f64 rate, then interleaved
// little-endian f64 I/Q.
void write_waveform(const std::filesystem::path& path, const ComplexWaveform& w);
ComplexWaveform read_waveform(const std::filesystem::path& path);

// CSV: symbol_index,subcarrier_index,re,im
void write_grid_csv(const std::filesystem::path& path, const GridReference& grid);
GridReference read_grid_csv(const std::filesystem::path& path);

} // namespace dpdlab
