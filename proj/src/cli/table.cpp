#include "holoq/cli/table.hpp"

#include <charconv>
#include <cmath>
#include <optional>

#include "holoq/errors.hpp"

namespace holoq::cli {

namespace {

bool fits(const Cell& c, ColumnKind kind) {
    switch (kind) {
        case ColumnKind::real: return std::holds_alternative<double>(c);
        case ColumnKind::complex: return std::holds_alternative<cplx>(c);
        case ColumnKind::integer: return std::holds_alternative<long long>(c);
        case ColumnKind::text: return std::holds_alternative<std::string>(c);
    }
    return false;
}

std::string csv_text(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

// (column index, part) for a flat name; part 0 = whole or re, 1 = im.
std::optional<std::pair<std::size_t, int>> locate(const std::vector<Column>& cols, const std::string& flat) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const auto& c = cols[i];
        if (c.kind == ColumnKind::complex) {
            if (flat == c.name + "_re") return std::pair{i, 0};
            if (flat == c.name + "_im") return std::pair{i, 1};
        } else if (flat == c.name) {
            return std::pair{i, 0};
        }
    }
    return std::nullopt;
}

}  // namespace

ResultTable::ResultTable(std::vector<Column> columns) : columns_(std::move(columns)) {}

void ResultTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size())
        throw NumericalError(ErrorCode::ColumnMismatch,
                             "row has " + std::to_string(row.size()) + " cells, table has " + std::to_string(columns_.size()) + " columns");
    for (std::size_t i = 0; i < row.size(); ++i)
        if (!fits(row[i], columns_[i].kind))
            throw NumericalError(ErrorCode::ColumnMismatch, "cell type does not match column '" + columns_[i].name + "'");
    rows_.push_back(std::move(row));
}

std::vector<std::string> ResultTable::flat_names() const {
    std::vector<std::string> names;
    for (const auto& c : columns_) {
        if (c.kind == ColumnKind::complex) {
            names.push_back(c.name + "_re");
            names.push_back(c.name + "_im");
        } else {
            names.push_back(c.name);
        }
    }
    return names;
}

bool ResultTable::has_flat(const std::string& flat_name) const {
    const auto loc = locate(columns_, flat_name);
    return loc && columns_[loc->first].kind != ColumnKind::text;
}

double ResultTable::numeric(std::size_t row, const std::string& flat_name) const {
    const auto loc = locate(columns_, flat_name);
    if (!loc) throw NumericalError(ErrorCode::ColumnMismatch, "no column '" + flat_name + "'");
    const auto& cell = rows_.at(row)[loc->first];
    if (const auto* d = std::get_if<double>(&cell)) return *d;
    if (const auto* z = std::get_if<cplx>(&cell)) return loc->second == 0 ? z->real() : z->imag();
    if (const auto* n = std::get_if<long long>(&cell)) return static_cast<double>(*n);
    throw NumericalError(ErrorCode::ColumnMismatch, "column '" + flat_name + "' is not numeric");
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0;  // drop the sign of negative zero
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const ResultTable& table) {
    const auto names = table.flat_names();
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << '\n';
    for (const auto& row : table.rows()) {
        bool first = true;
        auto put = [&](const std::string& s) {
            out << (first ? "" : ",") << s;
            first = false;
        };
        for (const auto& cell : row) {
            if (const auto* d = std::get_if<double>(&cell)) {
                put(format_number(*d));
            } else if (const auto* z = std::get_if<cplx>(&cell)) {
                put(format_number(z->real()));
                put(format_number(z->imag()));
            } else if (const auto* n = std::get_if<long long>(&cell)) {
                put(std::to_string(*n));
            } else {
                put(csv_text(std::get<std::string>(cell)));
            }
        }
        out << '\n';
    }
}

PlotKind parse_plot_kind(const std::string& s) {
    if (s == "heatmap") return PlotKind::heatmap;
    if (s == "line") return PlotKind::line;
    if (s == "field") return PlotKind::field;
    throw NumericalError(ErrorCode::ColumnMismatch, "unknown plot kind '" + s + "'");
}

void emit_plotdata(std::ostream& out, const ResultTable& table, const PlotSpec& spec) {
    std::size_t need = 0;
    switch (spec.kind) {
        case PlotKind::heatmap: need = 3; break;
        case PlotKind::line: need = 2; break;
        case PlotKind::field: need = 4; break;
    }
    if (spec.columns.size() != need)
        throw NumericalError(ErrorCode::ColumnMismatch, "plot kind needs " + std::to_string(need) + " columns, got " +
                                                            std::to_string(spec.columns.size()));
    for (const auto& c : spec.columns)
        if (!table.has_flat(c)) throw NumericalError(ErrorCode::ColumnMismatch, "plot column '" + c + "' missing or not numeric");

    out << '#';
    for (const auto& c : spec.columns) out << ' ' << c;
    out << '\n';
    std::optional<double> scanline;
    for (std::size_t r = 0; r < table.size(); ++r) {
        if (spec.kind == PlotKind::heatmap) {
            const double lead = table.numeric(r, spec.columns[0]);
            if (scanline && *scanline != lead) out << '\n';
            scanline = lead;
        }
        for (std::size_t i = 0; i < spec.columns.size(); ++i) out << (i ? " " : "") << format_number(table.numeric(r, spec.columns[i]));
        out << '\n';
    }
}

}  // namespace holoq::cli
