// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

namespace dpdlab {

// Forward DFT, no scaling: X[k] = sum_n x[n] e^{-j 2 pi k n / N}.
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x);

// Inverse DFT scaled by 1/N, so ifft(fft(x)) == x.
std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> x);

} // namespace dpdlab
