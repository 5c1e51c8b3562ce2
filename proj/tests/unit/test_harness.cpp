// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/error.hpp"
#include "dpdlab/harness.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dpdlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("dpdlab_harness_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::size_t line_count(const fs::path& p) {
    std::ifstream is(p);
    std::size_t n = 0;
    for (std::string line; std::getline(is, line);) ++n;
    return n;
}

ExperimentConfig small(const std::string& extra) {
    return parse_config("waveform.num_symbols = 4\n" + extra);
}

} // namespace

TEST(QuantizerForRho, UniformAtOrBelowZeroDb) {
    const QuantizerSpec base;
    EXPECT_EQ(quantizer_for_rho_db(base, -1.0).mode, QuantizerMode::Uniform);
    EXPECT_EQ(quantizer_for_rho_db(base, 0.0).rho, 1.0);
    const auto q = quantizer_for_rho_db(base, 20.0);
    EXPECT_EQ(q.mode, QuantizerMode::Logarithmic);
    EXPECT_NEAR(q.rho, 10.0, 1e-12);
}

TEST(RhoSweep, FullGridRowCountAndHeaders) {
    const auto dir = scratch("grid");
    const auto cfg = small("sweep.rho_db = -1:1:23\nilc.max_iterations = 3\n");
    const auto r = run_rho_sweep(cfg, dir);
    ASSERT_EQ(r.rows.size(), 25u);
    EXPECT_EQ(line_count(dir / "rho_sweep.csv"), 26u);
    for (const auto& row : r.rows) {
        EXPECT_TRUE(row.error.empty()) << row.error;
        EXPECT_EQ(row.mode, row.rho_db <= 0.0 ? QuantizerMode::Uniform : QuantizerMode::Logarithmic);
    }
    const auto text = slurp(dir / "rho_sweep.csv");
    EXPECT_EQ(text.rfind("rho_db,quantizer_mode,final_nmse_db,final_evm_db", 0), 0u);
    EXPECT_TRUE(fs::exists(dir / "rho_sweep_amam_024.csv"));
    EXPECT_TRUE(fs::exists(dir / "rho_sweep_ilc_000.csv"));
    EXPECT_EQ(slurp(dir / "rho_sweep_ilc_000.csv").rfind("iteration,nmse_db\n", 0), 0u);
}

TEST(RhoSweep, TrendFlagMatchesRows) {
    const auto dir = scratch("trend");
    const auto r = run_rho_sweep(small("sweep.rho_db = 0, 16\n"), dir);
    EXPECT_EQ(r.nmse_trend_improves, r.rows[1].final_nmse_db < r.rows[0].final_nmse_db);
    const auto summary = slurp(dir / "rho_sweep_summary.csv");
    EXPECT_NE(summary.find(std::string("nmse_trend_improves,") + (r.nmse_trend_improves ? "1" : "0")),
              std::string::npos);
}

TEST(RhoSweep, FailingPointDoesNotAbortSweep) {
    const auto dir = scratch("isolation");
    // 1e6 dB overflows rho to infinity, which the quantizer rejects.
    const auto r = run_rho_sweep(small("sweep.rho_db = 0, 1e6, 16\n"), dir);
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_TRUE(r.rows[0].error.empty());
    EXPECT_FALSE(r.rows[1].error.empty());
    EXPECT_TRUE(r.rows[2].error.empty());
    EXPECT_EQ(line_count(dir / "rho_sweep.csv"), 4u);
}

TEST(RhoSweep, ByteIdenticalAcrossRunsAndThreadCounts) {
    const auto cfg = small("sweep.rho_db = 0, 8, 16\nseed = 5\n");
    const auto a = scratch("det_a"), b = scratch("det_b");
    const auto ra = run_rho_sweep(cfg, a, 1);
    run_rho_sweep(cfg, b, 3);
    for (const auto& p : ra.artifacts) EXPECT_EQ(slurp(p), slurp(b / p.filename())) << p;
}

TEST(RhoSweep, SeedChangesOutput) {
    auto cfg = small("sweep.rho_db = 16\n");
    const auto a = scratch("seed_a"), b = scratch("seed_b");
    cfg.master_seed = 1;
    run_rho_sweep(cfg, a);
    cfg.master_seed = 2;
    run_rho_sweep(cfg, b);
    EXPECT_NE(slurp(a / "rho_sweep.csv"), slurp(b / "rho_sweep.csv"));
}

TEST(GmpFit, SingleWaveformMildPaTracksIlc) {
    const auto dir = scratch("gmp_small");
    const auto cfg = small(
        "scenario = gmp_fit\npa.preset = mild\ncapture.quantizer.enabled = false\n"
        "dataset.num_train = 1\ndataset.num_test = 1\ngmp.memory_depth = 4\n");
    const auto r = run_gmp_fit(cfg, dir);
    ASSERT_EQ(r.rows.size(), 1u);
    ASSERT_TRUE(r.rows[0].error.empty()) << r.rows[0].error;
    EXPECT_LE(r.gmp_nmse_db, r.ilc_nmse_db + 3.0);
    for (const char* f : {"gmp_fit.csv", "gmp_fit_summary.csv", "gmp_fit_coefficients.csv", "gmp_fit_psd.csv"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    EXPECT_EQ(slurp(dir / "gmp_fit_psd.csv").rfind("freq_hz,reference_db,no_dpd_db,ilc_db,gmp_db\n", 0), 0u);
    const auto model = read_gmp_csv(dir / "gmp_fit_coefficients.csv");
    EXPECT_EQ(model.coefficients, r.model.coefficients);
}

TEST(PowerSweep, BackoffTrendAndOrderSchedule) {
    const auto dir = scratch("power");
    const auto cfg = small(
        "scenario = power_sweep\nsweep.power_db = -20, -10, -5, 0\n"
        "dataset.num_train = 2\ndataset.num_test = 2\ngmp.memory_depth = 4\n");
    const auto r = run_power_sweep(cfg, dir);
    ASSERT_EQ(r.rows.size(), 4u);
    const std::vector<int> schedule{3, 5, 7, 9};
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        ASSERT_TRUE(r.rows[i].error.empty()) << r.rows[i].error;
        EXPECT_EQ(r.rows[i].gmp_order, schedule[i]);
        if (i) {
            EXPECT_GE(r.rows[i].ilc_evm_db, r.rows[i - 1].ilc_evm_db - 1.0);
        }
    }
    EXPECT_LE(r.rows[0].ilc_nmse_db, -60.0);
    EXPECT_EQ(slurp(dir / "power_sweep.csv")
                  .rfind("power_db,pa_output_power_db,ilc_evm_db,gmp_evm_db,ilc_nmse_db,gmp_nmse_db,gmp_order,error\n", 0),
              0u);
}

TEST(PsdExport, WritesSpectra) {
    const auto dir = scratch("psd");
    const auto r = run_psd_export(small("scenario = psd_export\nilc.max_iterations = 3\n"), dir);
    ASSERT_EQ(r.artifacts.size(), 1u);
    EXPECT_EQ(slurp(r.artifacts[0]).rfind("freq_hz,reference_db,no_dpd_db,ilc_db\n", 0), 0u);
    EXPECT_EQ(line_count(r.artifacts[0]), 4097u);
}

TEST(RunExperiment, DispatchesOnScenario) {
    const auto dir = scratch("dispatch");
    const auto s = run_experiment(small("sweep.rho_db = 0, 1e6\nilc.max_iterations = 2\n"), dir);
    EXPECT_EQ(s.failed_points, 1);
    EXPECT_FALSE(s.artifacts.empty());
}
