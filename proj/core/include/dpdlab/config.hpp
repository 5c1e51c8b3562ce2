// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dpdlab/capture.hpp"
#include "dpdlab/gmp.hpp"
#include "dpdlab/ilc.hpp"
#include "dpdlab/metrics.hpp"
#include "dpdlab/pa.hpp"
#include "dpdlab/waveform.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dpdlab {

enum class Scenario { RhoSweep, GmpFit, PowerSweep, PsdExport };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view name);

struct ExperimentConfig {
    Scenario scenario = Scenario::RhoSweep;
    std::uint64_t master_seed = 1;
    std::filesystem::path output_dir;  // empty: caller decides

    OfdmConfig waveform;
    std::string pa_preset = "testbed_like";
    PaModel pa = make_reference_pa(PaPreset::TestbedLike);
    CaptureConfig capture;  // template; rho and mode are set per sweep point
    int align_resolution = kDefaultFractionalResolution;
    IlcConfig ilc;
    GmpConfig gmp;
    std::size_t gmp_edge_exclude = 64;
    PsdConfig psd;

    std::vector<double> rho_grid_db;
    std::vector<double> power_grid_db;  // drive relative to unit RMS
    std::vector<int> gmp_orders;        // one per power point; empty: 3 -> 9
    bool shared_waveform = false;       // rho sweep: reuse one waveform for all points
    double gmp_fit_rho_db = 16.0;
    int num_train_waveforms = 10;
    int num_test_waveforms = 10;
    std::size_t scatter_points = 4000;  // per AM-AM/AM-PM file

    void validate() const;  // throws ConfigError
};

// Flat `key = value` text. `#` starts a comment. Lists are comma separated;
// `start:step:stop` expands to an inclusive arithmetic range. Unknown keys
// are errors. The PA preset is applied before any `pa.*` override,
// regardless of line order.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Odd GMP order for point `index` of `count`, rising linearly from 3 to 9.
int default_gmp_order(std::size_t index, std::size_t count);

} // namespace dpdlab
