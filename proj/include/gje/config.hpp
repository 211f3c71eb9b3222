#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "gje/genfun.hpp"
#include "gje/grid.hpp"
#include "gje/measure.hpp"
#include "gje/polygon.hpp"

namespace gje {

/// A parsed config value: scalar, string, bool, or (nested) array.
struct ConfigValue;
using ConfigArray = std::vector<ConfigValue>;
struct ConfigValue : std::variant<double, bool, std::string, ConfigArray> {
  using std::variant<double, bool, std::string, ConfigArray>::variant;
};

/// Flat key -> value map with dotted section paths ("task.resolution").
/// Populated from a TOML subset (sections, scalars, strings, booleans,
/// arrays, nested arrays, comments) or from a JSON object.
class ConfigMap {
 public:
  static ConfigMap parse_toml(const std::string& text);
  static ConfigMap parse_json(const std::string& text);
  static ConfigMap load(const std::string& path, std::string* raw_bytes = nullptr);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;
  std::string text(const std::string& key) const;
  std::string text_or(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::string> texts(const std::string& key) const;
  /// Array of numeric arrays (polygon vertices, support lists).
  std::vector<std::vector<double>> number_rows(const std::string& key) const;

  void set(const std::string& key, ConfigValue value) { values_[key] = std::move(value); }
  const std::map<std::string, ConfigValue>& entries() const { return values_; }

 private:
  std::map<std::string, ConfigValue> values_;
};

/// Problem assembly: generating function, potential, regions.
struct Problem {
  GeneratingFunction gf;
  std::string potential_kind;  // none | preset | grid-file | semi-discrete
  GridPotential u;             // empty when potential_kind == "none"
  SemiDiscretePotential semi_discrete;
  bool has_potential() const { return potential_kind != "none"; }
};

GeneratingFunction gf_from_config(const ConfigMap& cfg);
Problem problem_from_config(const ConfigMap& cfg, const std::string& config_dir);
Polygon polygon_from_rows(const std::vector<std::vector<double>>& rows);
std::vector<Polygon> regions_from_config(const ConfigMap& cfg);

}  // namespace gje
