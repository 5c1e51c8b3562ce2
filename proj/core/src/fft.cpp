// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace dpdlab {

namespace {

// fftw planner calls are not thread safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<std::complex<double>> transform(std::span<const std::complex<double>> x, int sign) {
    std::vector<std::complex<double>> out(x.begin(), x.end());
    if (out.empty()) return out;
    auto* buf = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(out.size()), buf, buf, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

} // namespace

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x) {
    return transform(x, FFTW_FORWARD);
}

std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> x) {
    auto out = transform(x, FFTW_BACKWARD);
    const double scale = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
    for (auto& v : out) v *= scale;
    return out;
}

} // namespace dpdlab
