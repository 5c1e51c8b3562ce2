// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace dpdlab {

// Locale-independent number formatting used for every emitted artifact, so
// identical runs give identical bytes.
std::string format_number(double v, int precision = 10);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(std::string_view v);
    void end_row();

private:
    std::ofstream out_;
    bool first_in_row_ = true;
    std::filesystem::path path_;
};

// Split a CSV line on commas (no quoting; dpdlab never writes quoted fields).
std::vector<std::string> split_csv_line(std::string_view line);

} // namespace dpdlab
