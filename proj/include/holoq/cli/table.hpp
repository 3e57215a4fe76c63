#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "holoq/matrix.hpp"

namespace holoq::cli {

enum class ColumnKind { real, complex, integer, text };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::real;
};

using Cell = std::variant<double, cplx, long long, std::string>;

/// Rectangular table; complex columns expand to <name>_re, <name>_im on output.
class ResultTable {
public:
    explicit ResultTable(std::vector<Column> columns);

    const std::vector<Column>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    // Throws ColumnMismatch if the row does not fit the schema.
    void add_row(std::vector<Cell> row);

    // Output column names after complex expansion.
    std::vector<std::string> flat_names() const;
    // Numeric value of a flat column (text cells are not numeric).
    double numeric(std::size_t row, const std::string& flat_name) const;
    bool has_flat(const std::string& flat_name) const;

private:
    std::vector<Column> columns_;
    std::vector<std::vector<Cell>> rows_;
};

// Shortest round-trip decimal form; nan/inf spelled as such.
std::string format_number(double x);

void write_csv(std::ostream& out, const ResultTable& table);

enum class PlotKind { heatmap, line, field };

struct PlotSpec {
    PlotKind kind = PlotKind::line;
    // heatmap: x, y, value; line: x, y; field: x, y, u, v (flat column names).
    std::vector<std::string> columns;
};

PlotKind parse_plot_kind(const std::string& s);

/// gnuplot whitespace blocks. Heatmaps start a new scanline (blank line)
/// whenever the first column changes.
void emit_plotdata(std::ostream& out, const ResultTable& table, const PlotSpec& spec);

}  // namespace holoq::cli
