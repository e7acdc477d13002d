// result_table.cpp — CSV/JSON serialization of result tables

#include "colsim/result_table.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace colsim::cli {

namespace {

std::string quote_if_needed(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

}  // namespace

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void ResultTable::add_row(std::vector<double> row) {
    if (row.size() != columns.size())
        throw std::logic_error("ResultTable: row width does not match columns");
    rows.push_back(std::move(row));
}

std::string ResultTable::to_csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out += ',';
        out += quote_if_needed(columns[c]);
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json ResultTable::to_json() const {
    nlohmann::json j;
    j["metadata"] = metadata;
    j["columns"] = columns;
    j["rows"] = rows;
    return j;
}

void ResultTable::write(const std::string& path) const {
    {
        std::ofstream csv(path, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write '" + path + "'");
        csv << to_csv();
    }
    std::string json_path = path;
    const auto dot = json_path.find_last_of('.');
    const auto slash = json_path.find_last_of('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        json_path.resize(dot);
    json_path += ".json";
    std::ofstream js(json_path, std::ios::binary);
    if (!js) throw std::runtime_error("cannot write '" + json_path + "'");
    js << to_json().dump(2) << '\n';
}

}  // namespace colsim::cli
