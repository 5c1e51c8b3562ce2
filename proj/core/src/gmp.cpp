// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/gmp.hpp"

#include "dpdlab/csv.hpp"
#include "dpdlab/error.hpp"
#include "dpdlab/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <string>

namespace dpdlab {

std::string_view to_string(GmpBranch b) {
    switch (b) {
    case GmpBranch::Aligned: return "aligned";
    case GmpBranch::Lagging: return "lagging";
    case GmpBranch::Leading: return "leading";
    }
    return "unknown";
}

namespace {

GmpBranch parse_branch(std::string_view name) {
    if (name == "aligned") return GmpBranch::Aligned;
    if (name == "lagging") return GmpBranch::Lagging;
    if (name == "leading") return GmpBranch::Leading;
    throw IoError("unknown GMP branch '" + std::string(name) + "'");
}

// Evaluates regressor columns for a contiguous range of rows.
class RegressorSource {
public:
    RegressorSource(std::span<const cplx> s, std::vector<GmpTerm> terms)
        : s_(s), terms_(std::move(terms)), env_(s.size()) {
        for (std::size_t i = 0; i < s.size(); ++i) env_[i] = std::abs(s[i]);
    }

    std::size_t num_terms() const { return terms_.size(); }

    // Rows [r0, r0 + out.rows()) into out (column-major, one term per column).
    void fill(std::size_t r0, Eigen::Ref<Eigen::MatrixXcd> out) const {
        const auto rows = static_cast<std::size_t>(out.rows());
        for (std::size_t t = 0; t < terms_.size(); ++t) {
            const GmpTerm& term = terms_[t];
            const int env_shift = term.branch == GmpBranch::Aligned ? 0
                                  : term.branch == GmpBranch::Lagging ? term.m
                                                                      : -term.m;
            for (std::size_t i = 0; i < rows; ++i)
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = value(r0 + i, term, env_shift);
        }
    }

    cplx value(std::size_t n, const GmpTerm& term, int env_shift) const {
        const auto ni = static_cast<long long>(n);
        const long long si = ni - term.l;
        if (si < 0 || si >= static_cast<long long>(s_.size())) return {};
        const cplx base = s_[static_cast<std::size_t>(si)];
        if (term.k == 1) return base;
        const long long ei = si - env_shift;
        if (ei < 0 || ei >= static_cast<long long>(s_.size())) return {};
        return base * int_pow(env_[static_cast<std::size_t>(ei)], term.k - 1);
    }

private:
    static double int_pow(double a, int e) {
        double r = 1.0;
        for (int i = 0; i < e; ++i) r *= a;
        return r;
    }

    std::span<const cplx> s_;
    std::vector<GmpTerm> terms_;
    std::vector<double> env_;
};

int env_shift_of(const GmpTerm& t) {
    return t.branch == GmpBranch::Aligned ? 0 : t.branch == GmpBranch::Lagging ? t.m : -t.m;
}

} // namespace

void GmpConfig::validate() const {
    if (order_K < 1) throw ConfigError("gmp.order must be >= 1");
    if (memory_depth_L < 0) throw ConfigError("gmp.memory_depth must be >= 0");
    if (cross_memory_M < 0) throw ConfigError("gmp.cross_memory must be >= 0");
    if (!(ridge >= 0.0)) throw ConfigError("gmp.ridge must be >= 0");
}

std::vector<GmpTerm> gmp_terms(const GmpConfig& cfg) {
    cfg.validate();
    std::vector<GmpTerm> terms;
    for (int l = 0; l <= cfg.memory_depth_L; ++l)
        for (int k = 1; k <= cfg.order_K; k += 2) terms.push_back({GmpBranch::Aligned, k, l, 0});
    const auto cross = [&](GmpBranch b) {
        for (int l = 0; l <= cfg.memory_depth_L; ++l)
            for (int m = 1; m <= cfg.cross_memory_M; ++m)
                for (int k = 3; k <= cfg.order_K; k += 2) terms.push_back({b, k, l, m});
    };
    if (cfg.include_lagging) cross(GmpBranch::Lagging);
    if (cfg.include_leading) cross(GmpBranch::Leading);
    return terms;
}

Eigen::MatrixXcd build_regressors(const ComplexWaveform& s, const GmpConfig& cfg) {
    const auto terms = gmp_terms(cfg);
    if (s.size() <= terms.size())
        throw ShapeError("regressor matrix would be underdetermined (" + std::to_string(s.size()) + " rows, " +
                         std::to_string(terms.size()) + " terms)");
    RegressorSource src(s.samples(), terms);
    Eigen::MatrixXcd a(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(terms.size()));
    src.fill(0, a);
    return a;
}

GmpModel fit_gmp(std::span<const ComplexWaveform> s_train, std::span<const ComplexWaveform> x_train,
                 const GmpConfig& cfg, const GmpFitOptions& options) {
    const auto terms = gmp_terms(cfg);
    const auto t = static_cast<Eigen::Index>(terms.size());
    if (s_train.empty() || s_train.size() != x_train.size())
        throw ShapeError("fit_gmp needs equally many input and target waveforms");

    std::size_t total_rows = 0;
    for (std::size_t w = 0; w < s_train.size(); ++w) {
        if (s_train[w].size() != x_train[w].size()) throw ShapeError("paired training waveforms differ in length");
        if (s_train[w].size() > 2 * options.edge_exclude) total_rows += s_train[w].size() - 2 * options.edge_exclude;
    }
    if (total_rows <= terms.size())
        throw ShapeError("not enough training samples (" + std::to_string(total_rows) + ") for " +
                         std::to_string(terms.size()) + " GMP terms");

    // Blockwise QR: keep R (T x T) and the first T entries of Q^H b.
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(t, t);
    Eigen::VectorXcd qtb = Eigen::VectorXcd::Zero(t);
    const std::size_t block = std::max<std::size_t>(options.block_rows, terms.size());

    const auto absorb = [&](const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b) {
        Eigen::MatrixXcd stacked(t + a.rows(), t);
        stacked.topRows(t) = r;
        stacked.bottomRows(a.rows()) = a;
        Eigen::VectorXcd rhs(t + a.rows());
        rhs.head(t) = qtb;
        rhs.tail(a.rows()) = b;
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(stacked);
        rhs.applyOnTheLeft(qr.householderQ().adjoint());
        r = qr.matrixQR().topRows(t).triangularView<Eigen::Upper>();
        qtb = rhs.head(t);
    };

    Eigen::MatrixXcd a;
    Eigen::VectorXcd b;
    for (std::size_t w = 0; w < s_train.size(); ++w) {
        const std::size_t n = s_train[w].size();
        if (n <= 2 * options.edge_exclude) continue;
        RegressorSource src(s_train[w].samples(), terms);
        for (std::size_t r0 = options.edge_exclude; r0 < n - options.edge_exclude; r0 += block) {
            const std::size_t rows = std::min(block, n - options.edge_exclude - r0);
            a.resize(static_cast<Eigen::Index>(rows), t);
            b.resize(static_cast<Eigen::Index>(rows));
            src.fill(r0, a);
            for (std::size_t i = 0; i < rows; ++i) b(static_cast<Eigen::Index>(i)) = x_train[w][r0 + i];
            absorb(a, b);
        }
    }
    if (cfg.ridge > 0.0) {
        a = Eigen::MatrixXcd::Identity(t, t) * std::sqrt(cfg.ridge);
        b = Eigen::VectorXcd::Zero(t);
        absorb(a, b);
    }

    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    const double condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();

    // Rank tolerance follows the usual max(rows, cols) * eps convention.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod;
    cod.setThreshold(static_cast<double>(std::max<std::size_t>(total_rows, terms.size())) *
                     std::numeric_limits<double>::epsilon());
    cod.compute(r);
    if (cod.rank() < t)
        throw ConditioningError("GMP regressor matrix is rank deficient (rank " + std::to_string(cod.rank()) +
                                    " of " + std::to_string(t) + ", condition " + format_number(condition, 4) + ")",
                                condition);
    const Eigen::VectorXcd c = cod.solve(qtb);

    GmpModel model;
    model.config = cfg;
    model.term_index = terms;
    model.coefficients.assign(c.data(), c.data() + c.size());
    model.condition_estimate = condition;

    double err = 0.0, ref = 0.0;
    for (std::size_t w = 0; w < s_train.size(); ++w) {
        const std::size_t n = s_train[w].size();
        if (n <= 2 * options.edge_exclude) continue;
        const auto pred = apply_gmp(model, s_train[w]);
        for (std::size_t i = options.edge_exclude; i < n - options.edge_exclude; ++i) {
            err += std::norm(pred[i] - x_train[w][i]);
            ref += std::norm(x_train[w][i]);
        }
    }
    model.residual_nmse_db = ref > 0.0 && err > 0.0 ? std::max(kMetricFloorDb, 10.0 * std::log10(err / ref))
                                                    : kMetricFloorDb;
    return model;
}

ComplexWaveform apply_gmp(const GmpModel& model, const ComplexWaveform& s) {
    if (model.coefficients.size() != model.term_index.size())
        throw ShapeError("GMP model has mismatched coefficient and term counts");
    RegressorSource src(s.samples(), model.term_index);
    std::vector<cplx> out(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
        cplx acc{};
        for (std::size_t t = 0; t < model.term_index.size(); ++t) {
            const auto& term = model.term_index[t];
            acc += model.coefficients[t] * src.value(n, term, env_shift_of(term));
        }
        out[n] = acc;
    }
    return s.with_samples(std::move(out));
}

void write_gmp_csv(const std::filesystem::path& path, const GmpModel& model) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    const auto& c = model.config;
    os << "gmp_config,version=" << kGmpTermOrderVersion << ",order_K=" << c.order_K
       << ",memory_depth_L=" << c.memory_depth_L << ",cross_memory_M=" << c.cross_memory_M
       << ",include_lagging=" << (c.include_lagging ? 1 : 0) << ",include_leading=" << (c.include_leading ? 1 : 0)
       << ",ridge=" << format_number(c.ridge, 17) << '\n';
    os << "branch,k,l,m,re,im\n";
    for (std::size_t t = 0; t < model.term_index.size(); ++t) {
        const auto& term = model.term_index[t];
        os << to_string(term.branch) << ',' << term.k << ',' << term.l << ',' << term.m << ','
           << format_number(model.coefficients[t].real(), 17) << ','
           << format_number(model.coefficients[t].imag(), 17) << '\n';
    }
    if (!os) throw IoError("write failed for " + path.string());
}

GmpModel read_gmp_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    std::string line;
    std::getline(is, line);
    const auto head = split_csv_line(line);
    if (head.empty() || head[0] != "gmp_config") throw IoError(path.string() + ": missing gmp_config header");
    std::map<std::string, std::string> kv;
    for (std::size_t i = 1; i < head.size(); ++i) {
        const auto eq = head[i].find('=');
        if (eq == std::string::npos) throw IoError(path.string() + ": malformed config field");
        kv[head[i].substr(0, eq)] = head[i].substr(eq + 1);
    }
    if (kv["version"] != std::to_string(kGmpTermOrderVersion))
        throw IoError(path.string() + ": unsupported GMP term ordering version");

    GmpModel model;
    try {
        model.config.order_K = std::stoi(kv.at("order_K"));
        model.config.memory_depth_L = std::stoi(kv.at("memory_depth_L"));
        model.config.cross_memory_M = std::stoi(kv.at("cross_memory_M"));
        model.config.include_lagging = kv.at("include_lagging") == "1";
        model.config.include_leading = kv.at("include_leading") == "1";
        model.config.ridge = kv.count("ridge") ? std::stod(kv.at("ridge")) : 0.0;
    } catch (const std::exception&) {
        throw IoError(path.string() + ": incomplete GMP config header");
    }

    std::getline(is, line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6) throw IoError(path.string() + ": malformed GMP row");
        model.term_index.push_back({parse_branch(f[0]), std::stoi(f[1]), std::stoi(f[2]), std::stoi(f[3])});
        model.coefficients.emplace_back(std::stod(f[4]), std::stod(f[5]));
    }
    if (model.term_index != gmp_terms(model.config))
        throw IoError(path.string() + ": term list does not match the canonical ordering for its config");
    return model;
}

} // namespace dpdlab
