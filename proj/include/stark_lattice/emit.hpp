#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace stark {

inline constexpr const char* kVersion = "0.1.0";

/// Header plus numeric records; every artifact is reduced to this before
/// writing.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string to_csv(const CsvTable& t) {
    std::string out;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (i)
            out += ',';
        out += t.header[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.header.size())
            throw NumericalError("CSV row width does not match the header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out += ',';
            out += format_number(row[i]);
        }
        out += '\n';
    }
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f)
        throw std::runtime_error("write to '" + path + "' failed");
}

inline std::string metadata_path(const std::string& csv_path) { return csv_path + ".meta.json"; }

/// Writes the CSV at `path` and the metadata sidecar next to it.
inline void emit(const CsvTable& table, const std::string& path, const nlohmann::json& metadata) {
    write_text(path, to_csv(table));
    write_text(metadata_path(path), metadata.dump(2) + "\n");
}

} // namespace stark
