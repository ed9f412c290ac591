#include "rda/result_table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace rda {

void ResultTable::add_row(std::vector<Cell> row)
{
    if (row.size() != columns.size()) {
        throw DimensionError("ResultTable: row has " + std::to_string(row.size()) + " cells, table has "
                             + std::to_string(columns.size()) + " columns");
    }
    rows.push_back(std::move(row));
}

void ResultTable::set_meta(const std::string& key, const std::string& value)
{
    for (auto& kv : metadata) {
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    }
    metadata.emplace_back(key, value);
}

int ResultTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

std::string format_number(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string format_cell(const Cell& cell)
{
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(double v) const { return std::isfinite(v) ? format_number(v) : ""; }
        std::string operator()(const Complex& v) const
        {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%.10g%+.10gi", v.real(), v.imag());
            return buf;
        }
        std::string operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
}

namespace {

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

nlohmann::ordered_json cell_json(const Cell& cell)
{
    if (std::holds_alternative<std::monostate>(cell)) {
        return nullptr;
    }
    if (const auto* v = std::get_if<long long>(&cell)) {
        return *v;
    }
    if (const auto* v = std::get_if<double>(&cell)) {
        if (!std::isfinite(*v)) {
            return nullptr;
        }
        // Round-trip through the CSV rendering so both formats carry the same digits.
        return std::stod(format_number(*v));
    }
    if (const auto* v = std::get_if<std::string>(&cell)) {
        return *v;
    }
    return format_cell(cell);
}

} // namespace

void write_csv(std::ostream& out, const ResultTable& table)
{
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << csv_escape(table.columns[i]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << csv_escape(format_cell(row[i]));
        }
        out << '\n';
    }
}

void write_json(std::ostream& out, const ResultTable& table)
{
    nlohmann::ordered_json doc;
    doc["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : table.metadata) {
        doc["metadata"][k] = v;
    }
    doc["columns"] = table.columns;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            r[table.columns[i]] = cell_json(row[i]);
        }
        doc["rows"].push_back(std::move(r));
    }
    out << doc.dump(2) << '\n';
}

void write_table(std::ostream& out, const ResultTable& table, TableFormat format)
{
    if (format == TableFormat::json) {
        write_json(out, table);
    } else {
        write_csv(out, table);
    }
}

void write_table(const std::string& path, const ResultTable& table, TableFormat format)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    write_table(out, table, format);
}

} // namespace rda
