#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "halfflow/grid.hpp"

namespace halfflow {

/// Field snapshot: `# n=..,L=..,N=..,m=..` header, then one row per site
/// (coordinates, then m components) in lexicographic site order.
void write_field_csv(std::ostream& os, const Field& field);
void write_field_csv(const std::filesystem::path& path, const Field& field);
Field read_field_csv(std::istream& is);
Field read_field_csv(const std::filesystem::path& path);

/// Rows of numbers with a header line of column names.
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace halfflow
