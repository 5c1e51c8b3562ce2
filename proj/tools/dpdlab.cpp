// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/capture.hpp"
#include "dpdlab/config.hpp"
#include "dpdlab/csv.hpp"
#include "dpdlab/error.hpp"
#include "dpdlab/harness.hpp"
#include "dpdlab/waveform.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

std::filesystem::path resolve_output_dir(const std::string& cli_out, const dpdlab::ExperimentConfig& cfg) {
    if (!cli_out.empty()) return cli_out;
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    if (const char* env = std::getenv("DPDLAB_OUT"); env && *env) return env;
    return "dpdlab_out";
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out, int parallel) {
    auto cfg = dpdlab::load_config(config_path);
    if (seed) cfg.master_seed = *seed;
    const auto dir = resolve_output_dir(out, cfg);
    const auto summary = dpdlab::run_experiment(cfg, dir, parallel);
    for (const auto& p : summary.artifacts) std::cout << p.string() << '\n';
    if (summary.failed_points > 0)
        std::cerr << "warning: " << summary.failed_points << " sweep point(s) failed; see the error column\n";
    return 0;
}

int cmd_quantizer_report(double rho_db, int bits) {
    dpdlab::QuantizerSpec spec = dpdlab::quantizer_for_rho_db({}, rho_db);
    spec.bits = bits;
    spec.validate();
    const auto q = spec.num_thresholds();
    const auto d = dpdlab::thresholds(spec.rho, q);
    const auto steps = dpdlab::step_sizes(spec.rho, q);
    std::cout << "q,threshold_lin,step_lin\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::cout << (i + 1) << ',' << dpdlab::format_number(d[i], 17) << ',';
        if (i < steps.size()) std::cout << dpdlab::format_number(steps[i], 17);
        std::cout << '\n';
    }
    return 0;
}

int cmd_waveform_gen(const std::string& config_path, std::uint64_t seed, const std::string& out,
                     const std::string& grid_out) {
    dpdlab::OfdmConfig ofdm;
    if (!config_path.empty()) ofdm = dpdlab::load_config(config_path).waveform;
    const auto [w, grid] = dpdlab::generate_ofdm(ofdm, seed);
    dpdlab::write_waveform(out, w);
    if (!grid_out.empty()) dpdlab::write_grid_csv(grid_out, grid);
    return 0;
}

int cmd_waveform_inspect(const std::string& path) {
    const auto w = dpdlab::read_waveform(path);
    std::cout << "samples," << w.size() << '\n'
              << "sample_rate_hz," << dpdlab::format_number(w.sample_rate()) << '\n'
              << "mean_power_lin," << dpdlab::format_number(w.mean_power()) << '\n'
              << "rms_lin," << dpdlab::format_number(w.rms()) << '\n'
              << "papr_db," << dpdlab::format_number(dpdlab::measure_papr(w)) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dpdlab: quantization-aware ILC predistortion experiments"};
    app.require_subcommand(1);

    std::string config_path, out;
    std::optional<std::uint64_t> seed;
    int parallel = 1;
    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--out", out, "Output directory (fallback: config output_dir, then $DPDLAB_OUT)");
    run->add_option("--parallel", parallel, "Worker threads")->check(CLI::Range(1, 1024));

    double rho_db = 0.0;
    int bits = 12;
    auto* report = app.add_subcommand("quantizer-report", "Print quantizer thresholds and step sizes as CSV");
    report->add_option("--rho-db", rho_db, "Peak-to-reference ratio in dB")->required();
    report->add_option("--bits", bits, "Bits per real component");

    auto* waveform = app.add_subcommand("waveform", "OFDM waveform utilities");
    waveform->require_subcommand(1);
    std::string gen_config, gen_out, grid_out;
    std::uint64_t gen_seed = 1;
    auto* gen = waveform->add_subcommand("gen", "Generate an OFDM waveform file");
    gen->add_option("--config", gen_config, "Config file supplying waveform.* keys")->check(CLI::ExistingFile);
    gen->add_option("--seed", gen_seed, "Seed");
    gen->add_option("--out", gen_out, "Waveform output file")->required();
    gen->add_option("--grid", grid_out, "Optional constellation grid CSV output");
    std::string inspect_path;
    auto* inspect = waveform->add_subcommand("inspect", "Print waveform statistics");
    inspect->add_option("file", inspect_path, "Waveform file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfigError;
    }

    try {
        if (*run) return cmd_run(config_path, seed, out, parallel);
        if (*report) return cmd_quantizer_report(rho_db, bits);
        if (*gen) return cmd_waveform_gen(gen_config, gen_seed, gen_out, grid_out);
        if (*inspect) return cmd_waveform_inspect(inspect_path);
    } catch (const dpdlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
    return 0;
}
