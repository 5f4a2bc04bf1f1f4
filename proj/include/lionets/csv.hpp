#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lionets::data {

using CsvRow = std::vector<std::string>;

struct CsvTable {
    CsvRow header;
    std::vector<CsvRow> rows;

    /// Index of a header column; throws ValidationError if absent.
    std::size_t column(std::string_view name) const;
};

/// RFC 4180 style: comma separated, double-quoted fields may contain commas, quotes
/// ("" escapes) and newlines. The first record is the header.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const CsvRow& row);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text, std::string_view what);

}  // namespace lionets::data
