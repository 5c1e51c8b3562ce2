// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace dpdlab {

// Portable random source. The engine's output sequence is fixed by the
// standard; the distribution mappings below are written out explicitly
// because std:: distributions differ between library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), unbiased.
    std::uint64_t uniform_index(std::uint64_t n);

    // Standard normal (Box-Muller, spare value cached).
    double gaussian();

    // Circular complex Gaussian with E|z|^2 = power.
    std::complex<double> complex_gaussian(double power);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Per-item seed: mixes the master seed, a scenario tag and an index so that
// sweep points are reproducible and mutually independent.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index);

} // namespace dpdlab
