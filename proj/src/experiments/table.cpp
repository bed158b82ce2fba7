#include "aoicache/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "json.hpp"

#include "aoicache/errors.hpp"

namespace aoicache {

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) {
        throw InternalError("table row has " + std::to_string(row.size()) + " cells, expected " +
                            std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(row));
}

void Table::append(const Table& other) {
    if (columns_.empty() && rows_.empty()) columns_ = other.columns_;
    if (other.columns_ != columns_) throw InternalError("appending a table with different columns");
    rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

std::size_t Table::column(const std::string& name) const {
    auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end()) throw InternalError("no table column '" + name + "'");
    return static_cast<std::size_t>(it - columns_.begin());
}

const Cell& Table::at(std::size_t row, const std::string& name) const { return rows_.at(row).at(column(name)); }

double Table::number(std::size_t row, const std::string& name) const {
    const Cell& c = at(row, name);
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    return std::numeric_limits<double>::quiet_NaN();
}

std::string Table::text(std::size_t row, const std::string& name) const {
    const Cell& c = at(row, name);
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    return {};
}

TableFormat format_for_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return TableFormat::csv;
    if (ext == ".json") return TableFormat::json;
    return TableFormat::text;
}

TableFormat parse_table_format(const std::string& name) {
    if (name == "csv") return TableFormat::csv;
    if (name == "json") return TableFormat::json;
    if (name == "text" || name == "txt") return TableFormat::text;
    throw InvalidParameter("format: expected csv, json or text, got '" + name + "'");
}

namespace {

std::string format_double(double v, int precision) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

std::string cell_string(const Cell& c, int precision) {
    return std::visit(
        [precision](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return {};
            } else if constexpr (std::is_same_v<T, double>) {
                return format_double(v, precision);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else {
                return v;
            }
        },
        c);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

}  // namespace

void write_csv(const Table& table, std::ostream& out) {
    const auto& cols = table.columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << csv_field(cols[i]);
    out << "\r\n";
    for (const auto& row : table.rows()) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << csv_field(cell_string(row[i], std::numeric_limits<double>::max_digits10));
        }
        out << "\r\n";
    }
}

void write_json(const Table& table, std::ostream& out) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    const auto& cols = table.columns();
    for (const auto& row : table.rows()) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>) {
                        obj[cols[i]] = nullptr;
                    } else if constexpr (std::is_same_v<T, double>) {
                        if (std::isfinite(v)) {
                            obj[cols[i]] = v;
                        } else {
                            obj[cols[i]] = nullptr;
                        }
                    } else {
                        obj[cols[i]] = v;
                    }
                },
                row[i]);
        }
        arr.push_back(std::move(obj));
    }
    out << arr.dump(2) << '\n';
}

void write_text(const Table& table, std::ostream& out, int precision) {
    const auto& cols = table.columns();
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> width(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) width[i] = cols[i].size();
    for (const auto& row : table.rows()) {
        auto& line = cells.emplace_back();
        for (std::size_t i = 0; i < row.size(); ++i) {
            line.push_back(cell_string(row[i], precision));
            if (line.back().empty()) line.back() = "-";
            width[i] = std::max(width[i], line.back().size());
        }
    }
    auto emit = [&](const std::vector<std::string>& line) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            out << line[i];
            if (i + 1 < line.size()) out << std::string(width[i] - line[i].size() + 2, ' ');
        }
        out << '\n';
    };
    emit(cols);
    for (const auto& line : cells) emit(line);
}

void write_table(const Table& table, std::ostream& out, TableFormat format, int precision) {
    switch (format) {
        case TableFormat::csv:
            write_csv(table, out);
            break;
        case TableFormat::json:
            write_json(table, out);
            break;
        case TableFormat::text:
            write_text(table, out, precision);
            break;
    }
}

void write_table_file(const Table& table, const std::filesystem::path& path, int precision) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file '" + path.string() + "'");
    write_table(table, out, format_for_path(path), precision);
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace aoicache
