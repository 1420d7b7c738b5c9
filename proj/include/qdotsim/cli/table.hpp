#pragma once

// Row-major numeric table with a unit per column and a provenance header.
// Written as CSV with a '#' header block, or as an equivalent JSON document.

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "../errors.hpp"

namespace qdotsim::cli {

struct Column {
    std::string name;
    std::string unit;  // "1" for dimensionless, "bool" for flags
};

struct ResultTable {
    std::string title;
    std::vector<Column> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> provenance;  // ordered key/value

    ResultTable(std::string t, std::vector<Column> cols) : title(std::move(t)), columns(std::move(cols)) {
        for (const auto& c : columns)
            if (c.unit.empty()) throw ValidationError("column has no unit", "columns." + c.name);
    }

    void add_row(std::vector<double> r) {
        if (r.size() != columns.size())
            throw ValidationError("row has " + std::to_string(r.size()) + " values, expected " +
                                      std::to_string(columns.size()),
                                  title);
        rows.push_back(std::move(r));
    }

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i].name == name) return i;
        throw ValidationError("no such column", title + "." + name);
    }

    /// Rows whose "converged" column is 0. Tables without the column count none.
    std::size_t failed_rows() const {
        std::size_t idx = columns.size();
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i].name == "converged") idx = i;
        if (idx == columns.size()) return 0;
        std::size_t n = 0;
        for (const auto& r : rows)
            if (r[idx] == 0.0) ++n;
        return n;
    }
};

/// Shortest round-trip decimal form; identical input gives identical bytes.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Fixed significant-digit form for echoed inputs, hiding SI round-trip noise.
inline std::string format_echo(double v, int digits = 10) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream& os, const ResultTable& t) {
    os << "# table: " << t.title << '\n';
    for (const auto& [k, v] : t.provenance) os << "# " << k << ": " << v << '\n';
    os << "# columns:";
    for (const auto& c : t.columns) os << ' ' << c.name << '[' << c.unit << ']';
    os << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << t.columns[i].name << '_' << t.columns[i].unit;
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
        os << '\n';
    }
}

inline nlohmann::json to_document(const ResultTable& t) {
    using nlohmann::json;
    json prov = json::array();
    for (const auto& [k, v] : t.provenance) prov.push_back({{"key", k}, {"value", v}});
    json cols = json::array();
    for (const auto& c : t.columns) cols.push_back({{"name", c.name}, {"unit", c.unit}});
    json rows = json::array();
    for (const auto& r : t.rows) {
        json row = json::array();
        for (double v : r) row.push_back(std::isfinite(v) ? json(v) : json(format_number(v)));
        rows.push_back(std::move(row));
    }
    return {{"table", t.title}, {"provenance", prov}, {"columns", cols}, {"rows", rows}};
}

enum class OutputFormat { Csv, Doc };

inline std::string render(const std::vector<ResultTable>& tables, OutputFormat fmt) {
    std::ostringstream os;
    if (fmt == OutputFormat::Csv) {
        for (std::size_t i = 0; i < tables.size(); ++i) {
            if (i) os << '\n';
            write_csv(os, tables[i]);
        }
    } else {
        nlohmann::json doc = nlohmann::json::array();
        for (const auto& t : tables) doc.push_back(to_document(t));
        os << doc.dump(2) << '\n';
    }
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file '" + path + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace qdotsim::cli
