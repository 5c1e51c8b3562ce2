// SPDX-License-Identifier: Apache-2.0
#include "dpdlab/csv.hpp"
#include "dpdlab/error.hpp"
#include "dpdlab/waveform.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>

namespace dpdlab {

namespace {

constexpr std::array<char, 8> kMagic{'I', 'L', 'C', 'W', 'A', 'V', 'E', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b.data(), 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
    std::array<unsigned char, 8> b{};
    is.read(reinterpret_cast<char*>(b.data()), 8);
    if (!is) throw IoError("truncated waveform file");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

} // namespace

void write_waveform(const std::filesystem::path& path, const ComplexWaveform& w) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write(kMagic.data(), kMagic.size());
    put_u64(os, w.size());
    put_f64(os, w.sample_rate());
    for (const auto& v : w.samples()) {
        put_f64(os, v.real());
        put_f64(os, v.imag());
    }
    if (!os) throw IoError("write failed for " + path.string());
}

ComplexWaveform read_waveform(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic) throw IoError(path.string() + " is not an ILCWAVE1 file");
    const std::uint64_t count = get_u64(is);
    const double rate = get_f64(is);
    if (count == 0 || count > (std::uint64_t{1} << 36)) throw IoError("implausible sample count in " + path.string());
    std::vector<cplx> samples(count);
    for (auto& v : samples) {
        const double re = get_f64(is);
        const double im = get_f64(is);
        v = {re, im};
    }
    return ComplexWaveform(std::move(samples), rate);
}

void write_grid_csv(const std::filesystem::path& path, const GridReference& grid) {
    CsvWriter csv(path, {"symbol_index", "subcarrier_index", "re", "im"});
    for (std::size_t s = 0; s < grid.num_symbols; ++s) {
        for (std::size_t k = 0; k < grid.num_subcarriers(); ++k) {
            const auto& v = grid.at(s, k);
            csv.cell(static_cast<long long>(s))
                .cell(static_cast<long long>(grid.subcarrier_indices[k]))
                .cell(std::string_view(format_number(v.real(), 17)))
                .cell(std::string_view(format_number(v.imag(), 17)));
            csv.end_row();
        }
    }
}

GridReference read_grid_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    std::string line;
    std::getline(is, line);
    if (split_csv_line(line) != std::vector<std::string>{"symbol_index", "subcarrier_index", "re", "im"})
        throw IoError(path.string() + ": unexpected grid CSV header");

    GridReference grid;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 4) throw IoError(path.string() + ": malformed grid row");
        const auto s = static_cast<std::size_t>(std::stoull(f[0]));
        const int k = std::stoi(f[1]);
        if (s == 0) grid.subcarrier_indices.push_back(k);
        const std::size_t width = grid.subcarrier_indices.size();
        if (s > 0 && (width == 0 || grid.subcarrier_indices[row % width] != k))
            throw IoError(path.string() + ": grid rows out of order");
        grid.num_symbols = s + 1;
        grid.data_symbols.emplace_back(std::stod(f[2]), std::stod(f[3]));
        ++row;
    }
    if (grid.data_symbols.size() != grid.num_symbols * grid.num_subcarriers())
        throw IoError(path.string() + ": incomplete grid");
    return grid;
}

} // namespace dpdlab
