// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/config.hpp"

#include "dpdlab/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace dpdlab {

std::string_view to_string(Scenario s) {
    switch (s) {
    case Scenario::RhoSweep: return "rho_sweep";
    case Scenario::GmpFit: return "gmp_fit";
    case Scenario::PowerSweep: return "power_sweep";
    case Scenario::PsdExport: return "psd_export";
    }
    return "unknown";
}

Scenario parse_scenario(std::string_view name) {
    std::string n(name);
    std::replace(n.begin(), n.end(), '-', '_');
    if (n == "rho_sweep") return Scenario::RhoSweep;
    if (n == "gmp_fit") return Scenario::GmpFit;
    if (n == "power_sweep") return Scenario::PowerSweep;
    if (n == "psd_export") return Scenario::PsdExport;
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

struct Entry {
    std::string value;
    int line;
};

class Reader {
public:
    explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    template <class F>
    void with(const std::string& key, F&& f) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return;
        used_.insert(key);
        try {
            f(it->second.value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(it->second.line) + ": " + key + ": " + e.what());
        }
    }

    void check_all_used() const {
        for (const auto& [key, entry] : entries_)
            if (!used_.count(key))
                throw ConfigError("line " + std::to_string(entry.line) + ": unknown key '" + key + "'");
    }

private:
    std::map<std::string, Entry> entries_;
    std::set<std::string> used_;
};

double to_double(const std::string& v) {
    double out = 0.0;
    const auto s = trim(v);
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, out);
    if (ec != std::errc{} || p != end || !std::isfinite(out)) throw ConfigError("expected a finite number, got '" + s + "'");
    return out;
}

long long to_int(const std::string& v) {
    long long out = 0;
    const auto s = trim(v);
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, out);
    if (ec != std::errc{} || p != end) throw ConfigError("expected an integer, got '" + s + "'");
    return out;
}

std::uint64_t to_u64(const std::string& v) {
    std::uint64_t out = 0;
    const auto s = trim(v);
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, out);
    if (ec != std::errc{} || p != end) throw ConfigError("expected a non-negative integer, got '" + s + "'");
    return out;
}

std::size_t to_size(const std::string& v) {
    const auto i = to_int(v);
    if (i < 0) throw ConfigError("expected a non-negative integer");
    return static_cast<std::size_t>(i);
}

int to_small_int(const std::string& v) {
    const auto i = to_int(v);
    if (i < -1'000'000'000 || i > 1'000'000'000) throw ConfigError("integer out of range");
    return static_cast<int>(i);
}

bool to_bool(const std::string& v) {
    const auto s = trim(v);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("expected a boolean, got '" + s + "'");
}

Rational to_rational(const std::string& v) {
    const auto s = trim(v);
    const auto slash = s.find('/');
    Rational r;
    if (slash == std::string::npos) {
        r = {to_small_int(s), 1};
    } else {
        r = {to_small_int(s.substr(0, slash)), to_small_int(s.substr(slash + 1))};
    }
    if (r.num <= 0 || r.den <= 0) throw ConfigError("ratio terms must be positive");
    return r;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(trim(part));
    return out;
}

// "a, b, c" or "start:step:stop" (inclusive, tolerant to rounding).
std::vector<double> to_doubles(const std::string& v) {
    const auto s = trim(v);
    if (s.empty()) return {};
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string part;
        while (std::getline(ss, part, ':')) parts.push_back(part);
        if (parts.size() != 3) throw ConfigError("range must be start:step:stop");
        const double start = to_double(parts[0]), step = to_double(parts[1]), stop = to_double(parts[2]);
        if (step == 0.0 || (stop - start) / step < 0.0) throw ConfigError("range step does not reach stop");
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 100000) throw ConfigError("range too long");
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) out[i] = start + step * static_cast<double>(i);
        return out;
    }
    std::vector<double> out;
    for (const auto& f : split_list(s)) out.push_back(to_double(f));
    return out;
}

std::vector<int> to_ints(const std::string& v) {
    std::vector<int> out;
    for (const double d : to_doubles(v)) {
        if (d != std::floor(d)) throw ConfigError("expected integers");
        out.push_back(static_cast<int>(d));
    }
    return out;
}

std::vector<cplx> to_fir(const std::vector<double>& re, const std::vector<double>& im) {
    if (!im.empty() && im.size() != re.size()) throw ConfigError("FIR real and imaginary lists differ in length");
    std::vector<cplx> taps(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) taps[i] = {re[i], im.empty() ? 0.0 : im[i]};
    return taps;
}

} // namespace

ExperimentConfig parse_config(std::string_view text) {
    std::map<std::string, Entry> entries;
    std::istringstream is{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const auto line = trim(std::string_view(raw).substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(std::string_view(line).substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (entries.count(key)) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        entries[key] = {trim(std::string_view(line).substr(eq + 1)), line_no};
    }

    Reader r(std::move(entries));
    ExperimentConfig c;

    r.with("scenario", [&](const std::string& v) { c.scenario = parse_scenario(trim(v)); });
    r.with("seed", [&](const std::string& v) { c.master_seed = to_u64(v); });
    r.with("output_dir", [&](const std::string& v) { c.output_dir = trim(v); });

    auto& w = c.waveform;
    r.with("waveform.fft_size", [&](const std::string& v) { w.fft_size = to_size(v); });
    r.with("waveform.occupied_subcarriers", [&](const std::string& v) { w.occupied_subcarriers = to_size(v); });
    r.with("waveform.num_symbols", [&](const std::string& v) { w.num_symbols = to_size(v); });
    r.with("waveform.cyclic_prefix", [&](const std::string& v) { w.cyclic_prefix_len = to_size(v); });
    r.with("waveform.constellation", [&](const std::string& v) { w.constellation = parse_constellation(trim(v)); });
    r.with("waveform.oversampling", [&](const std::string& v) { w.oversampling = to_rational(v); });
    r.with("waveform.bandwidth_hz", [&](const std::string& v) { w.bandwidth_hz = to_double(v); });
    r.with("waveform.edge_taper", [&](const std::string& v) { w.edge_taper_len = to_size(v); });

    r.with("pa.preset", [&](const std::string& v) {
        c.pa_preset = trim(v);
        c.pa = make_reference_pa(parse_pa_preset(c.pa_preset));
    });
    r.with("pa.gain", [&](const std::string& v) { c.pa.small_signal_gain = to_double(v); });
    r.with("pa.amam", [&](const std::string& v) {
        const auto s = trim(v);
        if (s == "rapp") c.pa.amam = RappAmAm{};
        else if (s == "saleh") c.pa.amam = SalehAmAm{};
        else throw ConfigError("expected rapp or saleh");
    });
    const auto rapp = [&]() -> RappAmAm& {
        if (!std::holds_alternative<RappAmAm>(c.pa.amam)) throw ConfigError("PA AM-AM is not rapp");
        return std::get<RappAmAm>(c.pa.amam);
    };
    const auto saleh = [&]() -> SalehAmAm& {
        if (!std::holds_alternative<SalehAmAm>(c.pa.amam)) throw ConfigError("PA AM-AM is not saleh");
        return std::get<SalehAmAm>(c.pa.amam);
    };
    r.with("pa.rapp.saturation", [&](const std::string& v) { rapp().saturation = to_double(v); });
    r.with("pa.rapp.smoothness", [&](const std::string& v) { rapp().smoothness = to_double(v); });
    r.with("pa.saleh.alpha", [&](const std::string& v) { saleh().alpha = to_double(v); });
    r.with("pa.saleh.beta", [&](const std::string& v) { saleh().beta = to_double(v); });
    r.with("pa.ampm", [&](const std::string& v) {
        const auto s = trim(v);
        if (s == "none") c.pa.ampm = NoAmPm{};
        else if (s == "saleh") c.pa.ampm = SalehAmPm{};
        else throw ConfigError("expected none or saleh");
    });
    const auto ampm = [&]() -> SalehAmPm& {
        if (!std::holds_alternative<SalehAmPm>(c.pa.ampm)) throw ConfigError("PA AM-PM is not saleh");
        return std::get<SalehAmPm>(c.pa.ampm);
    };
    r.with("pa.ampm.alpha", [&](const std::string& v) { ampm().alpha = to_double(v); });
    r.with("pa.ampm.beta", [&](const std::string& v) { ampm().beta = to_double(v); });
    std::vector<double> fir_re, fir_im, post_re, post_im;
    r.with("pa.memory_fir.re", [&](const std::string& v) { fir_re = to_doubles(v); });
    r.with("pa.memory_fir.im", [&](const std::string& v) { fir_im = to_doubles(v); });
    if (!fir_re.empty()) c.pa.memory_fir = to_fir(fir_re, fir_im);
    else if (!fir_im.empty()) throw ConfigError("pa.memory_fir.im given without pa.memory_fir.re");
    r.with("pa.post_fir.re", [&](const std::string& v) { post_re = to_doubles(v); });
    r.with("pa.post_fir.im", [&](const std::string& v) { post_im = to_doubles(v); });
    if (!post_re.empty()) c.pa.post_fir = to_fir(post_re, post_im);
    else if (!post_im.empty()) throw ConfigError("pa.post_fir.im given without pa.post_fir.re");

    auto& q = c.capture.quantizer;
    r.with("capture.quantizer.bits", [&](const std::string& v) { q.bits = to_small_int(v); });
    r.with("capture.quantizer.enabled", [&](const std::string& v) { q.enabled = to_bool(v); });
    r.with("capture.quantizer.mode", [&](const std::string& v) { q.mode = parse_quantizer_mode(trim(v)); });
    r.with("capture.quantizer.rho_db", [&](const std::string& v) { q.rho = rho_from_db(to_double(v)); });
    r.with("capture.noise_snr_db", [&](const std::string& v) {
        if (trim(v) == "none") c.capture.noise_snr_db.reset();
        else c.capture.noise_snr_db = to_double(v);
    });
    r.with("capture.fractional_delay", [&](const std::string& v) { c.capture.fractional_delay_samples = to_double(v); });
    r.with("capture.resample", [&](const std::string& v) {
        if (trim(v) == "none") c.capture.resample.reset();
        else c.capture.resample = to_rational(v);
    });

    r.with("align.fractional_resolution", [&](const std::string& v) { c.align_resolution = to_small_int(v); });

    r.with("ilc.max_iterations", [&](const std::string& v) { c.ilc.max_iterations = to_small_int(v); });
    r.with("ilc.step_mu", [&](const std::string& v) { c.ilc.step_mu = to_double(v); });
    r.with("ilc.update_mode", [&](const std::string& v) { c.ilc.update_mode = parse_update_mode(trim(v)); });
    r.with("ilc.convergence_nmse_db", [&](const std::string& v) { c.ilc.convergence_nmse_db = to_double(v); });
    r.with("ilc.gain_inverse_floor", [&](const std::string& v) { c.ilc.gain_inverse_floor = to_double(v); });

    r.with("gmp.order", [&](const std::string& v) { c.gmp.order_K = to_small_int(v); });
    r.with("gmp.memory_depth", [&](const std::string& v) { c.gmp.memory_depth_L = to_small_int(v); });
    r.with("gmp.cross_memory", [&](const std::string& v) { c.gmp.cross_memory_M = to_small_int(v); });
    r.with("gmp.include_lagging", [&](const std::string& v) { c.gmp.include_lagging = to_bool(v); });
    r.with("gmp.include_leading", [&](const std::string& v) { c.gmp.include_leading = to_bool(v); });
    r.with("gmp.ridge", [&](const std::string& v) { c.gmp.ridge = to_double(v); });
    r.with("gmp.edge_exclude", [&](const std::string& v) { c.gmp_edge_exclude = to_size(v); });

    r.with("psd.segment_len", [&](const std::string& v) { c.psd.segment_len = to_size(v); });
    r.with("psd.overlap", [&](const std::string& v) { c.psd.overlap_fraction = to_double(v); });

    r.with("sweep.rho_db", [&](const std::string& v) { c.rho_grid_db = to_doubles(v); });
    r.with("sweep.power_db", [&](const std::string& v) { c.power_grid_db = to_doubles(v); });
    r.with("sweep.gmp_orders", [&](const std::string& v) { c.gmp_orders = to_ints(v); });
    r.with("sweep.shared_waveform", [&](const std::string& v) { c.shared_waveform = to_bool(v); });
    r.with("sweep.scatter_points", [&](const std::string& v) { c.scatter_points = to_size(v); });
    r.with("gmp_fit.rho_db", [&](const std::string& v) { c.gmp_fit_rho_db = to_double(v); });
    r.with("dataset.num_train", [&](const std::string& v) { c.num_train_waveforms = to_small_int(v); });
    r.with("dataset.num_test", [&](const std::string& v) { c.num_test_waveforms = to_small_int(v); });

    r.check_all_used();
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

void ExperimentConfig::validate() const {
    waveform.validate();
    pa.validate();
    capture.validate();
    ilc.validate();
    gmp.validate();
    if (align_resolution < 1 || align_resolution > kMaxFractionalResolution)
        throw ConfigError("align.fractional_resolution must be in [1, " + std::to_string(kMaxFractionalResolution) + "]");
    if (psd.segment_len < 16) throw ConfigError("psd.segment_len must be >= 16");
    if (!(psd.overlap_fraction >= 0.0 && psd.overlap_fraction < 1.0)) throw ConfigError("psd.overlap must be in [0, 1)");
    if (num_train_waveforms < 1 || num_test_waveforms < 1) throw ConfigError("dataset sizes must be positive");
    if (!std::isfinite(gmp_fit_rho_db)) throw ConfigError("gmp_fit.rho_db must be finite");
    for (const double d : rho_grid_db)
        if (!std::isfinite(d)) throw ConfigError("sweep.rho_db entries must be finite");
    for (const double d : power_grid_db)
        if (!std::isfinite(d)) throw ConfigError("sweep.power_db entries must be finite");
    if (scenario == Scenario::RhoSweep && rho_grid_db.empty()) throw ConfigError("sweep.rho_db must not be empty");
    if (scenario == Scenario::PowerSweep) {
        if (power_grid_db.empty()) throw ConfigError("sweep.power_db must not be empty");
        if (!gmp_orders.empty() && gmp_orders.size() != power_grid_db.size())
            throw ConfigError("sweep.gmp_orders needs one entry per power point");
        for (const int k : gmp_orders)
            if (k < 1) throw ConfigError("sweep.gmp_orders entries must be >= 1");
    }
}

int default_gmp_order(std::size_t index, std::size_t count) {
    if (count <= 1) return 3;
    const double t = static_cast<double>(index) / static_cast<double>(count - 1);
    return 3 + 2 * static_cast<int>(std::lround(3.0 * t));
}

} // namespace dpdlab
