// result_table.hpp — Numeric result tables with CSV and JSON serialization

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace colsim::cli {

// Column-named numeric records plus a metadata block sufficient to re-run the
// command bit-identically (effective config, seed, version, diagnostics).
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    nlohmann::json metadata;

    void add_row(std::vector<double> row);

    // Headers then rows; 17 significant digits, '.' decimal separator,
    // LF line endings, RFC-4180 quoting.
    std::string to_csv() const;

    // {"metadata": ..., "columns": ..., "rows": ...}.
    nlohmann::json to_json() const;

    // Writes CSV to `path` and the JSON mirror next to it (extension .json).
    void write(const std::string& path) const;
};

// 17-significant-digit representation that round-trips doubles.
std::string format_double(double value);

}  // namespace colsim::cli
