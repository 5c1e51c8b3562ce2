// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dpdlab/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dpdlab {

// Quantizer used for a sweep point: rho <= 0 dB runs the uniform quantizer
// at rho = 1, anything above runs the logarithmic one.
QuantizerSpec quantizer_for_rho_db(const QuantizerSpec& base, double rho_db);

// PA followed by capture. Each call draws capture noise from a fresh seed
// derived from `seed` and the call count.
Plant make_plant(const PaModel& pa, const CaptureConfig& capture);

struct OutputQuality {
    double nmse_db = 0.0;  // guarded range, after fresh alignment
    double evm_db = 0.0;
    ComplexWaveform aligned;  // normalized PA output
};

// Quality of a PA output against the reference it should reproduce.
OutputQuality evaluate_output(const ComplexWaveform& reference, const GridReference& grid,
                              const ComplexWaveform& pa_output, const OfdmConfig& ofdm, int align_resolution);

struct RhoSweepRow {
    double rho_db = 0.0;
    QuantizerMode mode = QuantizerMode::Uniform;
    double final_nmse_db = 0.0;
    double final_evm_db = 0.0;
    double feedback_nmse_db = 0.0;
    double scatter_width = 0.0;
    int iterations = 0;
    std::string error;  // empty when the point succeeded
};

struct RhoSweepResult {
    std::vector<RhoSweepRow> rows;
    bool nmse_trend_improves = false;  // NMSE at the largest rho beats the smallest
    std::vector<std::filesystem::path> artifacts;
};

struct GmpFitRow {
    int waveform_index = 0;
    double ilc_nmse_db = 0.0;
    double ilc_evm_db = 0.0;
    double gmp_nmse_db = 0.0;
    double gmp_evm_db = 0.0;
    std::string error;
};

struct GmpFitResult {
    std::vector<GmpFitRow> rows;
    // Means over successful test waveforms, averaged in linear power.
    double ilc_nmse_db = 0.0;
    double ilc_evm_db = 0.0;
    double gmp_nmse_db = 0.0;
    double gmp_evm_db = 0.0;
    GmpModel model;
    std::vector<std::filesystem::path> artifacts;
};

struct PowerSweepRow {
    double power_db = 0.0;
    double pa_output_power_db = 0.0;
    double ilc_evm_db = 0.0;
    double gmp_evm_db = 0.0;
    double ilc_nmse_db = 0.0;
    double gmp_nmse_db = 0.0;
    int gmp_order = 0;
    std::string error;
};

struct PowerSweepResult {
    std::vector<PowerSweepRow> rows;
    std::vector<std::filesystem::path> artifacts;
};

struct PsdExportResult {
    std::vector<std::filesystem::path> artifacts;
};

// Each scenario writes its CSVs into `out_dir` (created if missing). Sweep
// points or waveforms run on up to `parallel` threads; output bytes do not
// depend on the thread count.
RhoSweepResult run_rho_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, int parallel = 1);
GmpFitResult run_gmp_fit(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, int parallel = 1);
PowerSweepResult run_power_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                 int parallel = 1);
PsdExportResult run_psd_export(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, int parallel = 1);

struct ExperimentSummary {
    std::vector<std::filesystem::path> artifacts;
    int failed_points = 0;
};

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                 int parallel = 1);

} // namespace dpdlab
