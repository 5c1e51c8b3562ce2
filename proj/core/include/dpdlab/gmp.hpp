// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dpdlab/waveform.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace dpdlab {

enum class GmpBranch { Aligned, Lagging, Leading };

std::string_view to_string(GmpBranch b);

// One regressor column. Aligned: s(n-l)|s(n-l)|^{k-1}. Lagging:
// s(n-l)|s(n-l-m)|^{k-1}. Leading: s(n-l)|s(n-l+m)|^{k-1}. m is 0 for the
// aligned branch.
struct GmpTerm {
    GmpBranch branch;
    int k;
    int l;
    int m;
    friend bool operator==(const GmpTerm&, const GmpTerm&) = default;
};

struct GmpConfig {
    int order_K = 7;         // highest order; only odd orders <= K are used
    int memory_depth_L = 20;
    int cross_memory_M = 1;
    bool include_lagging = true;
    bool include_leading = true;
    double ridge = 0.0;      // Tikhonov weight, 0 = plain least squares

    void validate() const;  // throws ConfigError
    friend bool operator==(const GmpConfig&, const GmpConfig&) = default;
};

// Canonical ordering (format version 1):
//   aligned:  for l in [0, L], for odd k in [1, K]
//   lagging:  for l in [0, L], for m in [1, M], for odd k in [3, K]
//   leading:  same as lagging
// Cross branches skip k = 1, which would duplicate aligned columns.
inline constexpr int kGmpTermOrderVersion = 1;
std::vector<GmpTerm> gmp_terms(const GmpConfig& cfg);

// N x T regressor matrix; history outside the record is zero. Throws
// ShapeError when N <= T.
Eigen::MatrixXcd build_regressors(const ComplexWaveform& s, const GmpConfig& cfg);

struct GmpModel {
    GmpConfig config;
    std::vector<GmpTerm> term_index;
    std::vector<cplx> coefficients;
    double residual_nmse_db = 0.0;    // training fit, dB
    double condition_estimate = 1.0;  // of the regressor matrix
};

struct GmpFitOptions {
    // Rows within this many samples of either end of each record are left
    // out of the fit (their regressors still see the full record).
    std::size_t edge_exclude = 0;
    std::size_t block_rows = 4096;
};

// Least-squares predistorter fit s -> x. Rows are compressed blockwise with
// Householder QR and the final triangular system is solved with a complete
// orthogonal decomposition. Throws ConditioningError when rank deficient.
GmpModel fit_gmp(std::span<const ComplexWaveform> s_train, std::span<const ComplexWaveform> x_train,
                 const GmpConfig& cfg, const GmpFitOptions& options = {});

ComplexWaveform apply_gmp(const GmpModel& model, const ComplexWaveform& s);

// CSV: config header row, then branch,k,l,m,re,im per term.
void write_gmp_csv(const std::filesystem::path& path, const GmpModel& model);
GmpModel read_gmp_csv(const std::filesystem::path& path);

} // namespace dpdlab
