#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace riskaudit {

/// A parsed delimiter-separated table: one header row plus data rows of
/// equal width. Cells are kept as raw strings; typing happens at
/// validation time.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const;  // npos if absent
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Reads a delimited table with a header row. Handles double-quoted cells
/// with "" escapes; rows with a cell count different from the header are an
/// error. Throws std::runtime_error on I/O or structural problems.
RawTable read_table(const std::string& path, char delimiter = ',');
RawTable read_table(std::istream& in, char delimiter = ',');

/// Formats a double with 17 significant digits so a round-trip through text
/// reproduces the exact value.
std::string format_double(double v);

/// Quotes a cell if it contains the delimiter, a quote or a newline.
std::string escape_cell(const std::string& cell, char delimiter = ',');

}  // namespace riskaudit
