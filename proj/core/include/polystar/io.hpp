#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "polystar/steady.hpp"

namespace polystar::io {

struct Column {
  std::string name;
  std::string unit;  ///< empty for dimensionless columns
  std::vector<double> values;
};

/// CSV text: one "# " line per comment, one "# name: unit" line per column,
/// then the header row and the data rows. Numbers use the shortest
/// round-trip form with '.' as decimal separator, so identical inputs give
/// identical bytes. Throws PreconditionError on ragged columns.
std::string format_csv(const std::vector<Column>& columns,
                       const std::vector<std::string>& comments = {});

/// Quotes a CSV field when it holds a comma, quote or line break.
std::string csv_field(std::string_view text);

/// Shortest decimal form that parses back to the same double.
std::string format_number(double x);

/// Writes `content` to a temporary sibling and renames it over `path`.
/// Creates missing parent directories. Throws Error on I/O failure.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Columns r, rho0, V0, m (enclosed mass) of a steady profile.
std::vector<Column> profile_columns(const steady::RadialProfile& profile);

}  // namespace polystar::io
