#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace aoicache {

/// Empty cells (monostate) are written as empty CSV fields and JSON null.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

class Table {
public:
    Table() = default;
    explicit Table(std::vector<std::string> columns);

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }

    /// Throws InternalError on a width mismatch.
    void add_row(std::vector<Cell> row);
    void append(const Table& other);

    std::size_t column(const std::string& name) const;
    const Cell& at(std::size_t row, const std::string& name) const;
    /// NaN for empty or text cells.
    double number(std::size_t row, const std::string& name) const;
    std::string text(std::size_t row, const std::string& name) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

enum class TableFormat { csv, json, text };

/// .csv and .json by extension, anything else is the aligned text form.
TableFormat format_for_path(const std::filesystem::path& path);
TableFormat parse_table_format(const std::string& name);

/// Header row, RFC 4180 quoting, full round-trip precision.
void write_csv(const Table& table, std::ostream& out);
/// Array of row objects keyed by column name, in column order.
void write_json(const Table& table, std::ostream& out);
/// Space-aligned columns with numbers at `precision` significant digits.
void write_text(const Table& table, std::ostream& out, int precision = 6);

void write_table(const Table& table, std::ostream& out, TableFormat format, int precision = 6);
void write_table_file(const Table& table, const std::filesystem::path& path, int precision = 6);

}  // namespace aoicache
