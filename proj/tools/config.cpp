#include "config.hpp"

#include <set>
#include <sstream>

#include "polystar/error.hpp"

namespace polystar::cli {

namespace {

// Keys that have no default but may appear in a user file.
const std::set<std::string> kOptionalKeys = {"eos.c1", "eos.gamma1", "eos.c2", "eos.gamma2",
                                             "steady.mass", "evolve.t_end"};

toml::table parse_text(const std::string& text, const std::string& where) {
  try {
    return toml::parse(text, where);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << where << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
        << e.description();
    throw ConfigError(msg.str());
  }
}

}  // namespace

const toml::node& Section::at(const std::string& key) const {
  const toml::node* n = table_ ? table_->get(key) : nullptr;
  if (!n) throw ConfigError("missing key " + name_ + "." + key);
  return *n;
}

double Section::number(const std::string& key) const {
  const auto& n = at(key);
  if (auto v = n.value<double>(); v && (n.is_floating_point() || n.is_integer())) return *v;
  throw ConfigError(name_ + "." + key + " must be a number");
}

std::optional<double> Section::optional_number(const std::string& key) const {
  if (!table_ || !table_->contains(key)) return std::nullopt;
  return number(key);
}

std::int64_t Section::integer(const std::string& key) const {
  const auto& n = at(key);
  if (auto v = n.value<std::int64_t>(); v && n.is_integer()) return *v;
  throw ConfigError(name_ + "." + key + " must be an integer");
}

std::string Section::string(const std::string& key) const {
  const auto& n = at(key);
  if (auto v = n.value<std::string>(); v && n.is_string()) return *v;
  throw ConfigError(name_ + "." + key + " must be a string");
}

std::vector<double> Section::numbers(const std::string& key) const {
  const auto* arr = at(key).as_array();
  if (!arr) throw ConfigError(name_ + "." + key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& el : *arr) {
    auto v = el.value<double>();
    if (!v) throw ConfigError(name_ + "." + key + " must be an array of numbers");
    out.push_back(*v);
  }
  return out;
}

double Section::positive(const std::string& key) const {
  const double v = number(key);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(name_ + "." + key + " must be a finite number > 0");
  }
  return v;
}

std::size_t Section::count(const std::string& key, std::int64_t min) const {
  const auto v = integer(key);
  if (v < min) throw ConfigError(name_ + "." + key + " must be >= " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

Config Config::load(const std::string& path) {
  Config c;
  c.merged_ = parse_text(reference_config(), "reference.toml");
  c.source_ = "built-in defaults";
  if (path.empty()) return c;

  try {
    c.user_ = toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << path << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
        << e.description();
    throw ConfigError(msg.str());
  }
  c.from_file_ = true;
  c.source_ = path;

  for (const auto& [k, node] : c.user_) {
    const std::string key(k.str());
    toml::node* base = c.merged_.get(key);
    if (!base) throw ConfigError("unknown configuration key '" + key + "'");
    if (base->is_table() != node.is_table()) {
      throw ConfigError("'" + key + "' must " + (base->is_table() ? "be a table" : "not be a table"));
    }
    if (!node.is_table()) {
      c.merged_.insert_or_assign(key, node);
      continue;
    }
    auto* dst = base->as_table();
    for (const auto& [sk, sub] : *node.as_table()) {
      const std::string full = key + "." + std::string(sk.str());
      if (!dst->contains(sk.str()) && !kOptionalKeys.count(full)) {
        throw ConfigError("unknown configuration key '" + full + "'");
      }
      dst->insert_or_assign(sk.str(), sub);
    }
  }
  return c;
}

Section Config::section(const std::string& name) const {
  return Section(merged_.get_as<toml::table>(name), name);
}

bool Config::user_has(const std::string& name) const { return user_.contains(name); }

std::uint64_t Config::seed() const {
  const auto* n = merged_.get("seed");
  auto v = n ? n->value<std::int64_t>() : std::nullopt;
  if (!v || *v < 0) throw ConfigError("seed must be a nonnegative integer");
  return static_cast<std::uint64_t>(*v);
}

std::string Config::out_dir() const {
  const auto* n = merged_.get("out");
  auto v = n ? n->value<std::string>() : std::nullopt;
  if (!v || v->empty()) throw ConfigError("out must be a non-empty string");
  return *v;
}

Eos Config::eos() const {
  if (from_file_ && !user_has("eos")) {
    throw ConfigError("missing [eos] table (kind = \"polytrope\" with c and gamma, or \"two_power\")");
  }
  const auto s = section("eos");
  const auto kind = s.string("kind");
  if (kind == "polytrope") {
    const double gamma = s.number("gamma");
    if (!(gamma > 1.0)) throw ConfigError("eos.gamma must be > 1");
    return Eos::polytrope(s.positive("c"), gamma);
  }
  if (kind == "two_power") {
    const double g1 = s.number("gamma1"), g2 = s.number("gamma2");
    if (!(g1 > 1.0 && g2 > 1.0)) throw ConfigError("eos.gamma1 and eos.gamma2 must be > 1");
    return Eos::two_power(s.positive("c1"), g1, s.positive("c2"), g2);
  }
  throw ConfigError("eos.kind must be \"polytrope\" or \"two_power\", got \"" + kind + "\"");
}

nlohmann::json Config::to_json() const {
  std::ostringstream os;
  os << toml::json_formatter{merged_};
  return nlohmann::json::parse(os.str());
}

}  // namespace polystar::cli
