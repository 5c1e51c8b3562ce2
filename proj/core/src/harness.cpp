// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/harness.hpp"

#include "dpdlab/align.hpp"
#include "dpdlab/csv.hpp"
#include "dpdlab/error.hpp"
#include "dpdlab/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <thread>

namespace dpdlab {

namespace {

namespace fs = std::filesystem;

// Runs fn(i) for i in [0, count) on up to `threads` workers. fn must not
// throw.
template <class F>
void parallel_for(std::size_t count, int threads, F&& fn) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

std::string describe(const std::exception& e) {
    std::string msg = e.what();
    for (char& ch : msg)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return msg;
}

double db_mean(const std::vector<double>& values_db) {
    if (values_db.empty()) return std::nan("");
    double acc = 0.0;
    for (const double v : values_db) acc += std::pow(10.0, v / 10.0);
    return 10.0 * std::log10(acc / static_cast<double>(values_db.size()));
}

fs::path prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

std::string indexed(std::string_view stem, std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03zu", i);
    return std::string(stem) + "_" + buf + ".csv";
}

struct Stimulus {
    ComplexWaveform s;
    GridReference grid;
};

Stimulus make_stimulus(const OfdmConfig& ofdm, std::uint64_t seed, double drive_db = 0.0) {
    auto [w, grid] = generate_ofdm(ofdm, seed);
    if (drive_db != 0.0) w = w.scaled(std::pow(10.0, drive_db / 20.0));
    return {std::move(w), std::move(grid)};
}

CaptureConfig capture_at(const ExperimentConfig& cfg, double rho_db, std::uint64_t seed) {
    CaptureConfig c = cfg.capture;
    c.quantizer = quantizer_for_rho_db(cfg.capture.quantizer, rho_db);
    c.seed = seed;
    return c;
}

void write_trajectory(const fs::path& path, const IlcResult& r) {
    CsvWriter w(path, {"iteration", "nmse_db"});
    for (std::size_t i = 0; i < r.per_iteration_nmse_db.size(); ++i)
        w.cell(static_cast<long long>(i)).cell(r.per_iteration_nmse_db[i]).end_row();
}

void write_scatter(const fs::path& path, const std::vector<AmAmPoint>& pts, std::size_t max_points) {
    CsvWriter w(path, {"input_amplitude_lin", "output_amplitude_lin", "phase_delta_rad"});
    const std::size_t stride = max_points == 0 ? 1 : std::max<std::size_t>(1, pts.size() / max_points);
    for (std::size_t i = 0; i < pts.size(); i += stride)
        w.cell(pts[i].input_amplitude).cell(pts[i].output_amplitude).cell(pts[i].phase_delta).end_row();
}

void write_psd_table(const fs::path& path, const std::vector<std::string>& names, const std::vector<Psd>& spectra) {
    std::vector<std::string> header{"freq_hz"};
    for (const auto& n : names) header.push_back(n + "_db");
    CsvWriter w(path, header);
    for (std::size_t b = 0; b < spectra.front().freq_hz.size(); ++b) {
        w.cell(spectra.front().freq_hz[b]);
        for (const auto& p : spectra) w.cell(p.level_db[b]);
        w.end_row();
    }
}

ComplexWaveform trimmed(const ComplexWaveform& w) {
    const auto r = guarded_range(w.size());
    return w.with_samples(std::vector<cplx>(w.samples().begin() + static_cast<std::ptrdiff_t>(r.begin),
                                            w.samples().begin() + static_cast<std::ptrdiff_t>(r.end)));
}

// Train ILC at the GMP-fit rho, fit a GMP, then compare ILC and GMP on test
// waveforms. Shared by the gmp-fit and power-sweep scenarios.
struct GmpFlow {
    GmpFitResult result;
    // First test waveform as {reference, no DPD, ILC, GMP} outputs; empty if
    // that waveform failed.
    std::vector<ComplexWaveform> first;
};

GmpFlow gmp_flow(const ExperimentConfig& cfg, const GmpConfig& gmp_cfg, double drive_db, std::string_view tag,
                 int parallel) {
    const auto ntrain = static_cast<std::size_t>(cfg.num_train_waveforms);
    const auto ntest = static_cast<std::size_t>(cfg.num_test_waveforms);

    std::vector<ComplexWaveform> s_train(ntrain, ComplexWaveform({cplx{}}, 1.0));
    std::vector<ComplexWaveform> x_train = s_train;
    std::vector<std::exception_ptr> train_errors(ntrain);
    parallel_for(ntrain, parallel, [&](std::size_t i) {
        try {
            auto stim = make_stimulus(cfg.waveform, derive_seed(cfg.master_seed, std::string(tag) + "/train", i),
                                      drive_db);
            const auto plant = make_plant(
                cfg.pa, capture_at(cfg, cfg.gmp_fit_rho_db, derive_seed(cfg.master_seed, std::string(tag) + "/train_capture", i)));
            auto ilc = ilc_run(stim.s, plant, cfg.ilc, cfg.align_resolution);
            s_train[i] = std::move(stim.s);
            x_train[i] = std::move(ilc.final_input);
        } catch (...) {
            train_errors[i] = std::current_exception();
        }
    });
    for (const auto& e : train_errors)
        if (e) std::rethrow_exception(e);

    GmpFlow flow;
    GmpFitOptions fit_options;
    fit_options.edge_exclude = cfg.gmp_edge_exclude;
    flow.result.model = fit_gmp(s_train, x_train, gmp_cfg, fit_options);
    s_train.clear();
    x_train.clear();

    auto& rows = flow.result.rows;
    rows.resize(ntest);
    std::vector<Stimulus> first(1, Stimulus{ComplexWaveform({cplx{}}, 1.0), {}});
    std::vector<ComplexWaveform> first_outputs(3, ComplexWaveform({cplx{}}, 1.0));
    parallel_for(ntest, parallel, [&](std::size_t i) {
        auto& row = rows[i];
        row.waveform_index = static_cast<int>(i);
        try {
            auto stim =
                make_stimulus(cfg.waveform, derive_seed(cfg.master_seed, std::string(tag) + "/test", i), drive_db);
            const auto plant = make_plant(
                cfg.pa, capture_at(cfg, cfg.gmp_fit_rho_db, derive_seed(cfg.master_seed, std::string(tag) + "/test_capture", i)));
            const auto ilc = ilc_run(stim.s, plant, cfg.ilc, cfg.align_resolution);
            const auto y_ilc = apply_pa(cfg.pa, ilc.final_input);
            const auto q_ilc = evaluate_output(stim.s, stim.grid, y_ilc, cfg.waveform, cfg.align_resolution);
            row.ilc_nmse_db = q_ilc.nmse_db;
            row.ilc_evm_db = q_ilc.evm_db;

            const auto y_gmp = apply_pa(cfg.pa, apply_gmp(flow.result.model, stim.s));
            const auto q_gmp = evaluate_output(stim.s, stim.grid, y_gmp, cfg.waveform, cfg.align_resolution);
            row.gmp_nmse_db = q_gmp.nmse_db;
            row.gmp_evm_db = q_gmp.evm_db;
            if (i == 0) {
                first_outputs[0] = apply_pa(cfg.pa, stim.s);
                first_outputs[1] = y_ilc;
                first_outputs[2] = y_gmp;
                first[0] = std::move(stim);
            }
        } catch (const std::exception& e) {
            row.error = describe(e);
        }
    });

    std::vector<double> ilc_nmse, ilc_evm, gmp_nmse, gmp_evm;
    for (const auto& r : rows) {
        if (!r.error.empty()) continue;
        ilc_nmse.push_back(r.ilc_nmse_db);
        ilc_evm.push_back(r.ilc_evm_db);
        gmp_nmse.push_back(r.gmp_nmse_db);
        gmp_evm.push_back(r.gmp_evm_db);
    }
    if (ilc_nmse.empty()) throw PlantError("every test waveform failed: " + rows.front().error);
    flow.result.ilc_nmse_db = db_mean(ilc_nmse);
    flow.result.ilc_evm_db = db_mean(ilc_evm);
    flow.result.gmp_nmse_db = db_mean(gmp_nmse);
    flow.result.gmp_evm_db = db_mean(gmp_evm);
    if (rows.front().error.empty()) {
        flow.first.push_back(std::move(first[0].s));
        for (auto& w : first_outputs) flow.first.push_back(std::move(w));
    }
    return flow;
}

} // namespace

QuantizerSpec quantizer_for_rho_db(const QuantizerSpec& base, double rho_db) {
    QuantizerSpec q = base;
    if (rho_db <= 0.0) {
        q.mode = QuantizerMode::Uniform;
        q.rho = 1.0;
    } else {
        q.mode = QuantizerMode::Logarithmic;
        q.rho = rho_from_db(rho_db);
    }
    return q;
}

Plant make_plant(const PaModel& pa, const CaptureConfig& capture) {
    auto calls = std::make_shared<std::uint64_t>(0);
    return [pa, capture, calls](const ComplexWaveform& x) {
        CaptureConfig c = capture;
        c.seed = derive_seed(capture.seed, "capture_call", (*calls)++);
        return capture_chain(apply_pa(pa, x), c);
    };
}

OutputQuality evaluate_output(const ComplexWaveform& reference, const GridReference& grid,
                              const ComplexWaveform& pa_output, const OfdmConfig& ofdm, int align_resolution) {
    const auto al = estimate_delay(reference, pa_output, align_resolution);
    OutputQuality q{0.0, 0.0, apply_alignment(pa_output, al, reference.size())};
    const auto r = guarded_range(reference.size());
    q.nmse_db = nmse(reference.samples().subspan(r.begin, r.size()), q.aligned.samples().subspan(r.begin, r.size()));
    q.evm_db = evm_subcarrier(grid, q.aligned, ofdm);
    return q;
}

RhoSweepResult run_rho_sweep(const ExperimentConfig& cfg, const fs::path& out_dir, int parallel) {
    if (cfg.rho_grid_db.empty()) throw ConfigError("rho sweep needs a non-empty sweep.rho_db");
    prepare_dir(out_dir);
    RhoSweepResult result;
    result.rows.resize(cfg.rho_grid_db.size());
    std::vector<fs::path> point_files(2 * cfg.rho_grid_db.size());

    parallel_for(cfg.rho_grid_db.size(), parallel, [&](std::size_t i) {
        auto& row = result.rows[i];
        row.rho_db = cfg.rho_grid_db[i];
        try {
            const auto capture =
                capture_at(cfg, row.rho_db, derive_seed(cfg.master_seed, "rho_sweep/capture", i));
            row.mode = capture.quantizer.mode;
            const auto stim = make_stimulus(
                cfg.waveform, derive_seed(cfg.master_seed, "rho_sweep/waveform", cfg.shared_waveform ? 0 : i));
            const auto ilc = ilc_run(stim.s, make_plant(cfg.pa, capture), cfg.ilc, cfg.align_resolution);
            row.iterations = ilc.iterations;
            row.feedback_nmse_db = ilc.per_iteration_nmse_db.back();

            const auto q = evaluate_output(stim.s, stim.grid, apply_pa(cfg.pa, ilc.final_input), cfg.waveform,
                                           cfg.align_resolution);
            row.final_nmse_db = q.nmse_db;
            row.final_evm_db = q.evm_db;

            const auto pts = amam_ampm(trimmed(stim.s), trimmed(q.aligned));
            double peak = 0.0;
            for (const auto& p : pts) peak = std::max(peak, p.input_amplitude);
            row.scatter_width = amam_scatter_width(pts, 0.0, peak, 50);

            point_files[2 * i] = out_dir / indexed("rho_sweep_ilc", i);
            write_trajectory(point_files[2 * i], ilc);
            point_files[2 * i + 1] = out_dir / indexed("rho_sweep_amam", i);
            write_scatter(point_files[2 * i + 1], pts, cfg.scatter_points);
        } catch (const std::exception& e) {
            row.error = describe(e);
        }
    });

    const fs::path main = out_dir / "rho_sweep.csv";
    {
        CsvWriter w(main, {"rho_db", "quantizer_mode", "final_nmse_db", "final_evm_db", "feedback_nmse_db",
                           "iterations", "amam_scatter_width_lin", "error"});
        for (const auto& r : result.rows) {
            w.cell(r.rho_db).cell(to_string(r.mode));
            if (r.error.empty())
                w.cell(r.final_nmse_db).cell(r.final_evm_db).cell(r.feedback_nmse_db)
                    .cell(static_cast<long long>(r.iterations)).cell(r.scatter_width).cell("");
            else
                w.cell("").cell("").cell("").cell("").cell("").cell(r.error);
            w.end_row();
        }
    }

    const auto lo = std::min_element(cfg.rho_grid_db.begin(), cfg.rho_grid_db.end()) - cfg.rho_grid_db.begin();
    const auto hi = std::max_element(cfg.rho_grid_db.begin(), cfg.rho_grid_db.end()) - cfg.rho_grid_db.begin();
    const auto& rlo = result.rows[static_cast<std::size_t>(lo)];
    const auto& rhi = result.rows[static_cast<std::size_t>(hi)];
    result.nmse_trend_improves =
        rlo.error.empty() && rhi.error.empty() && rhi.final_nmse_db < rlo.final_nmse_db;
    const fs::path summary = out_dir / "rho_sweep_summary.csv";
    {
        CsvWriter w(summary, {"key", "value"});
        w.cell("nmse_trend_improves").cell(result.nmse_trend_improves ? "1" : "0").end_row();
        w.cell("nmse_at_min_rho_db").cell(rlo.final_nmse_db).end_row();
        w.cell("nmse_at_max_rho_db").cell(rhi.final_nmse_db).end_row();
    }

    result.artifacts = {main, summary};
    for (const auto& p : point_files)
        if (!p.empty()) result.artifacts.push_back(p);
    return result;
}

GmpFitResult run_gmp_fit(const ExperimentConfig& cfg, const fs::path& out_dir, int parallel) {
    prepare_dir(out_dir);
    auto flow = gmp_flow(cfg, cfg.gmp, 0.0, "gmp_fit", parallel);
    auto& result = flow.result;

    const fs::path main = out_dir / "gmp_fit.csv";
    {
        CsvWriter w(main, {"waveform_index", "ilc_nmse_db", "ilc_evm_db", "gmp_nmse_db", "gmp_evm_db", "error"});
        for (const auto& r : result.rows) {
            w.cell(static_cast<long long>(r.waveform_index));
            if (r.error.empty())
                w.cell(r.ilc_nmse_db).cell(r.ilc_evm_db).cell(r.gmp_nmse_db).cell(r.gmp_evm_db).cell("");
            else
                w.cell("").cell("").cell("").cell("").cell(r.error);
            w.end_row();
        }
    }
    const fs::path summary = out_dir / "gmp_fit_summary.csv";
    {
        CsvWriter w(summary, {"key", "value"});
        w.cell("ilc_nmse_db").cell(result.ilc_nmse_db).end_row();
        w.cell("ilc_evm_db").cell(result.ilc_evm_db).end_row();
        w.cell("gmp_nmse_db").cell(result.gmp_nmse_db).end_row();
        w.cell("gmp_evm_db").cell(result.gmp_evm_db).end_row();
        w.cell("gmp_terms").cell(static_cast<long long>(result.model.term_index.size())).end_row();
        w.cell("gmp_fit_residual_nmse_db").cell(result.model.residual_nmse_db).end_row();
        w.cell("gmp_condition_estimate").cell(result.model.condition_estimate).end_row();
    }
    const fs::path coeffs = out_dir / "gmp_fit_coefficients.csv";
    write_gmp_csv(coeffs, result.model);
    result.artifacts = {main, summary, coeffs};

    if (!flow.first.empty()) {
        const fs::path spectra = out_dir / "gmp_fit_psd.csv";
        std::vector<Psd> levels;
        for (const auto& w : flow.first) levels.push_back(psd(w, cfg.psd));
        write_psd_table(spectra, {"reference", "no_dpd", "ilc", "gmp"}, levels);
        result.artifacts.push_back(spectra);
    }
    return result;
}

PowerSweepResult run_power_sweep(const ExperimentConfig& cfg, const fs::path& out_dir, int parallel) {
    if (cfg.power_grid_db.empty()) throw ConfigError("power sweep needs a non-empty sweep.power_db");
    prepare_dir(out_dir);
    PowerSweepResult result;
    result.rows.resize(cfg.power_grid_db.size());
    for (std::size_t i = 0; i < cfg.power_grid_db.size(); ++i) {
        auto& row = result.rows[i];
        row.power_db = cfg.power_grid_db[i];
        row.gmp_order = cfg.gmp_orders.empty() ? default_gmp_order(i, cfg.power_grid_db.size()) : cfg.gmp_orders[i];
        try {
            GmpConfig g = cfg.gmp;
            g.order_K = row.gmp_order;
            const auto flow = gmp_flow(cfg, g, row.power_db, "power_sweep", parallel);
            row.ilc_evm_db = flow.result.ilc_evm_db;
            row.gmp_evm_db = flow.result.gmp_evm_db;
            row.ilc_nmse_db = flow.result.ilc_nmse_db;
            row.gmp_nmse_db = flow.result.gmp_nmse_db;
            row.pa_output_power_db =
                !flow.first.empty() ? 10.0 * std::log10(flow.first[2].mean_power()) : std::nan("");
        } catch (const std::exception& e) {
            row.error = describe(e);
        }
    }

    const fs::path main = out_dir / "power_sweep.csv";
    {
        CsvWriter w(main, {"power_db", "pa_output_power_db", "ilc_evm_db", "gmp_evm_db", "ilc_nmse_db",
                           "gmp_nmse_db", "gmp_order", "error"});
        for (const auto& r : result.rows) {
            w.cell(r.power_db);
            if (r.error.empty())
                w.cell(r.pa_output_power_db).cell(r.ilc_evm_db).cell(r.gmp_evm_db).cell(r.ilc_nmse_db)
                    .cell(r.gmp_nmse_db);
            else
                w.cell("").cell("").cell("").cell("").cell("");
            w.cell(static_cast<long long>(r.gmp_order)).cell(r.error).end_row();
        }
    }
    result.artifacts = {main};
    return result;
}

PsdExportResult run_psd_export(const ExperimentConfig& cfg, const fs::path& out_dir, int) {
    prepare_dir(out_dir);
    const auto stim = make_stimulus(cfg.waveform, derive_seed(cfg.master_seed, "psd_export/waveform", 0));
    const auto capture = capture_at(cfg, cfg.gmp_fit_rho_db, derive_seed(cfg.master_seed, "psd_export/capture", 0));
    const auto ilc = ilc_run(stim.s, make_plant(cfg.pa, capture), cfg.ilc, cfg.align_resolution);
    const fs::path path = out_dir / "psd_export.csv";
    write_psd_table(path, {"reference", "no_dpd", "ilc"},
                    {psd(stim.s, cfg.psd), psd(apply_pa(cfg.pa, stim.s), cfg.psd),
                     psd(apply_pa(cfg.pa, ilc.final_input), cfg.psd)});
    return {{path}};
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir, int parallel) {
    ExperimentSummary s;
    switch (cfg.scenario) {
    case Scenario::RhoSweep: {
        auto r = run_rho_sweep(cfg, out_dir, parallel);
        s.artifacts = std::move(r.artifacts);
        for (const auto& row : r.rows) s.failed_points += row.error.empty() ? 0 : 1;
        break;
    }
    case Scenario::GmpFit: {
        auto r = run_gmp_fit(cfg, out_dir, parallel);
        s.artifacts = std::move(r.artifacts);
        for (const auto& row : r.rows) s.failed_points += row.error.empty() ? 0 : 1;
        break;
    }
    case Scenario::PowerSweep: {
        auto r = run_power_sweep(cfg, out_dir, parallel);
        s.artifacts = std::move(r.artifacts);
        for (const auto& row : r.rows) s.failed_points += row.error.empty() ? 0 : 1;
        break;
    }
    case Scenario::PsdExport: s.artifacts = run_psd_export(cfg, out_dir, parallel).artifacts; break;
    }
    return s;
}

} // namespace dpdlab
