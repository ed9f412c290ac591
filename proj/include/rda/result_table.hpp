#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rda/linsolve.hpp"

namespace rda {

/// An empty cell (std::monostate) marks an undefined value such as an
/// observed order without a preceding row.
using Cell = std::variant<std::monostate, long long, double, Complex, std::string>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    /// Insertion-ordered key/value pairs (config echo, version, summaries).
    std::vector<std::pair<std::string, std::string>> metadata;
    /// Rows whose solve failed or did not converge.
    int failed_rows = 0;

    /// Throws DimensionError if the row width differs from the column count.
    void add_row(std::vector<Cell> row);
    void set_meta(const std::string& key, const std::string& value);
    int column(const std::string& name) const;
};

enum class TableFormat { csv, json };

/// Doubles as %.10g, complex values as "re+imi", empty cells as "".
std::string format_cell(const Cell& cell);

/// Header row then one line per row; metadata is not part of the CSV.
void write_csv(std::ostream& out, const ResultTable& table);
/// {"metadata": {...}, "columns": [...], "rows": [{...}, ...]}.
void write_json(std::ostream& out, const ResultTable& table);
void write_table(const std::string& path, const ResultTable& table, TableFormat format);
void write_table(std::ostream& out, const ResultTable& table, TableFormat format);

/// "%.10g" rendering used for metadata values.
std::string format_number(double v);

} // namespace rda
