#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "polystar/eos.hpp"

namespace polystar::cli {

/// Built-in defaults (the text of tools/reference.toml).
const std::string& reference_config();

/// Typed read access to one table of the merged configuration. Missing
/// keys and wrong types raise ConfigError naming "section.key".
class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  double number(const std::string& key) const;
  std::optional<double> optional_number(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::string string(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;

  double positive(const std::string& key) const;
  std::size_t count(const std::string& key, std::int64_t min) const;

 private:
  const toml::node& at(const std::string& key) const;
  const toml::table* table_;
  std::string name_;
};

/// Defaults overlaid with a user file. Unknown sections or keys are
/// rejected so that typos do not fall back silently to defaults.
class Config {
 public:
  /// `path` empty: defaults only.
  static Config load(const std::string& path);

  Section section(const std::string& name) const;
  bool user_has(const std::string& name) const;
  bool from_file() const { return from_file_; }
  std::string source() const { return source_; }

  std::uint64_t seed() const;
  std::string out_dir() const;

  /// Equation of state from [eos]; with a user file the table is required.
  Eos eos() const;

  /// The merged configuration as JSON (for provenance records).
  nlohmann::json to_json() const;

 private:
  toml::table merged_;
  toml::table user_;
  bool from_file_ = false;
  std::string source_;
};

}  // namespace polystar::cli
