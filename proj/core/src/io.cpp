#include "polystar/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <random>

#include "polystar/error.hpp"
#include "polystar/gravity.hpp"

namespace polystar::io {

std::string format_number(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string format_csv(const std::vector<Column>& columns, const std::vector<std::string>& comments) {
  if (columns.empty()) throw PreconditionError("format_csv: no columns");
  const std::size_t rows = columns.front().values.size();
  for (const auto& c : columns) {
    if (c.values.size() != rows) {
      throw PreconditionError("format_csv: column '" + c.name + "' has " +
                              std::to_string(c.values.size()) + " rows, expected " +
                              std::to_string(rows));
    }
  }
  std::string out;
  for (const auto& line : comments) out += "# " + line + "\r\n";
  for (const auto& c : columns) {
    out += "# " + c.name + ": " + (c.unit.empty() ? std::string("dimensionless") : c.unit) + "\r\n";
  }
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j) out += ',';
    out += csv_field(columns[j].name);
  }
  out += "\r\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out += ',';
      out += format_number(columns[j].values[i]);
    }
    out += "\r\n";
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::vector<Column> profile_columns(const steady::RadialProfile& p) {
  const auto r = p.grid->r();
  auto m = gravity::enclosed_mass(p.density()).m;
  return {
      {"r", "length", {r.begin(), r.end()}},
      {"rho0", "mass/length^3", p.rho0},
      {"V0", "length^2/time^2", p.V0},
      {"m", "mass", std::move(m)},
  };
}

}  // namespace polystar::io
