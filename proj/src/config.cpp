#include "gje/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gje {

namespace {

// --- TOML subset -----------------------------------------------------------

struct TomlCursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws_inline() {
    while (!done() && (peek() == ' ' || peek() == '\t')) take();
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error("config parse error at line " + std::to_string(line) + ": " + what);
  }
};

ConfigValue parse_value(TomlCursor& cur);

ConfigValue parse_array(TomlCursor& cur) {
  ConfigArray arr;
  cur.take();  // '['
  for (;;) {
    // Arrays may span lines.
    while (!cur.done() && (std::isspace(static_cast<unsigned char>(cur.peek())) ||
                           cur.peek() == '#')) {
      if (cur.peek() == '#') {
        while (!cur.done() && cur.peek() != '\n') cur.take();
      } else {
        cur.take();
      }
    }
    if (cur.done()) cur.fail("unterminated array");
    if (cur.peek() == ']') {
      cur.take();
      return arr;
    }
    arr.push_back(parse_value(cur));
    while (!cur.done() && std::isspace(static_cast<unsigned char>(cur.peek()))) cur.take();
    if (!cur.done() && cur.peek() == ',') {
      cur.take();
      continue;
    }
    if (!cur.done() && cur.peek() == ']') {
      cur.take();
      return arr;
    }
  }
}

ConfigValue parse_value(TomlCursor& cur) {
  cur.skip_ws_inline();
  if (cur.done()) cur.fail("expected a value");
  char c = cur.peek();
  if (c == '[') return parse_array(cur);
  if (c == '"') {
    cur.take();
    std::string s;
    while (!cur.done() && cur.peek() != '"') {
      char ch = cur.take();
      if (ch == '\\' && !cur.done()) ch = cur.take();
      s.push_back(ch);
    }
    if (cur.done()) cur.fail("unterminated string");
    cur.take();
    return s;
  }
  std::string token;
  while (!cur.done() && cur.peek() != '\n' && cur.peek() != ',' && cur.peek() != ']' &&
         cur.peek() != '#') {
    token.push_back(cur.take());
  }
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back())))
    token.pop_back();
  if (token == "true") return true;
  if (token == "false") return false;
  try {
    std::size_t used = 0;
    double num = std::stod(token, &used);
    if (used == token.size()) return num;
  } catch (...) {
  }
  cur.fail("cannot parse value '" + token + "'");
}

}  // namespace

ConfigMap ConfigMap::parse_toml(const std::string& text) {
  ConfigMap cfg;
  TomlCursor cur{text};
  std::string section;
  while (!cur.done()) {
    cur.skip_ws_inline();
    if (cur.done()) break;
    char c = cur.peek();
    if (c == '\n') {
      cur.take();
      continue;
    }
    if (c == '#') {
      while (!cur.done() && cur.peek() != '\n') cur.take();
      continue;
    }
    if (c == '[') {
      cur.take();
      std::string name;
      while (!cur.done() && cur.peek() != ']') name.push_back(cur.take());
      if (cur.done()) cur.fail("unterminated section header");
      cur.take();
      section = name;
      continue;
    }
    // key = value
    std::string key;
    while (!cur.done() && cur.peek() != '=' && cur.peek() != '\n') key.push_back(cur.take());
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
    if (cur.done() || cur.peek() != '=') cur.fail("expected '=' after key '" + key + "'");
    cur.take();
    ConfigValue value = parse_value(cur);
    std::string full = section.empty() ? key : section + "." + key;
    cfg.values_[full] = std::move(value);
  }
  return cfg;
}

namespace {

ConfigValue from_json_value(const nlohmann::json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_array()) {
    ConfigArray arr;
    for (const auto& item : j) arr.push_back(from_json_value(item));
    return arr;
  }
  throw Error("config json: unsupported value type");
}

void flatten_json(const nlohmann::json& j, const std::string& prefix, ConfigMap& cfg) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object())
      flatten_json(*it, key, cfg);
    else
      cfg.set(key, from_json_value(*it));
  }
}

}  // namespace

ConfigMap ConfigMap::parse_json(const std::string& text) {
  ConfigMap cfg;
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw Error("config json: top level must be an object");
  flatten_json(j, "", cfg);
  return cfg;
}

ConfigMap ConfigMap::load(const std::string& path, std::string* raw_bytes) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (raw_bytes) *raw_bytes = text;
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
    return parse_json(text);
  return parse_toml(text);
}

double ConfigMap::number(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("config: missing required key '" + key + "'");
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  throw Error("config: key '" + key + "' is not a number");
}

double ConfigMap::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

bool ConfigMap::boolean_or(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const bool* b = std::get_if<bool>(&it->second)) return *b;
  throw Error("config: key '" + key + "' is not a boolean");
}

std::string ConfigMap::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("config: missing required key '" + key + "'");
  if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
  throw Error("config: key '" + key + "' is not a string");
}

std::string ConfigMap::text_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

std::vector<double> ConfigMap::numbers(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("config: missing required key '" + key + "'");
  const ConfigArray* arr = std::get_if<ConfigArray>(&it->second);
  if (!arr) throw Error("config: key '" + key + "' is not an array");
  std::vector<double> out;
  for (const auto& v : *arr) {
    const double* d = std::get_if<double>(&v);
    if (!d) throw Error("config: key '" + key + "' must hold numbers");
    out.push_back(*d);
  }
  return out;
}

std::vector<std::string> ConfigMap::texts(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("config: missing required key '" + key + "'");
  const ConfigArray* arr = std::get_if<ConfigArray>(&it->second);
  if (!arr) throw Error("config: key '" + key + "' is not an array");
  std::vector<std::string> out;
  for (const auto& v : *arr) {
    const std::string* s = std::get_if<std::string>(&v);
    if (!s) throw Error("config: key '" + key + "' must hold strings");
    out.push_back(*s);
  }
  return out;
}

std::vector<std::vector<double>> ConfigMap::number_rows(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("config: missing required key '" + key + "'");
  const ConfigArray* arr = std::get_if<ConfigArray>(&it->second);
  if (!arr) throw Error("config: key '" + key + "' is not an array");
  std::vector<std::vector<double>> rows;
  for (const auto& row : *arr) {
    const ConfigArray* inner = std::get_if<ConfigArray>(&row);
    if (!inner) throw Error("config: key '" + key + "' must hold arrays of numbers");
    std::vector<double> vals;
    for (const auto& v : *inner) {
      const double* d = std::get_if<double>(&v);
      if (!d) throw Error("config: key '" + key + "' must hold numbers");
      vals.push_back(*d);
    }
    rows.push_back(std::move(vals));
  }
  return rows;
}

// --- problem assembly -------------------------------------------------------

GeneratingFunction gf_from_config(const ConfigMap& cfg) {
  std::string family = cfg.text_or("generating_function.family", "bilinear");
  std::vector<double> params;
  if (cfg.has("generating_function.params")) params = cfg.numbers("generating_function.params");
  int dim = static_cast<int>(cfg.number_or("generating_function.dim", 2));

  bool custom_box = cfg.has("generating_function.x_min");
  if (!custom_box) return builtin(family, params, dim);

  auto to_vec = [](const std::vector<double>& v) {
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
  };
  DomainBox box;
  box.x_lo = to_vec(cfg.numbers("generating_function.x_min"));
  box.x_hi = to_vec(cfg.numbers("generating_function.x_max"));
  box.y_lo = to_vec(cfg.numbers("generating_function.y_min"));
  box.y_hi = to_vec(cfg.numbers("generating_function.y_max"));
  double zl = cfg.number("generating_function.z_min");
  double zh = cfg.number("generating_function.z_max");
  box.z_lo = [zl](const Vec&, const Vec&) { return zl; };
  box.z_hi = [zh](const Vec&, const Vec&) { return zh; };
  if (box.x_lo.size() != dim || box.y_lo.size() != dim)
    throw Error("config: box dimensions disagree with generating_function.dim");
  for (int i = 0; i < dim; ++i)
    if (box.x_lo[i] >= box.x_hi[i] || box.y_lo[i] >= box.y_hi[i])
      throw Error("config: degenerate box bounds");
  if (zl >= zh) throw Error("config: degenerate z bounds");
  return builtin(family, params, dim, box);
}

Polygon polygon_from_rows(const std::vector<std::vector<double>>& rows) {
  Polygon poly;
  for (const auto& row : rows) {
    if (row.size() != 2) throw Error("config: polygon vertices must be [x, y] pairs");
    Vec v(2);
    v[0] = row[0];
    v[1] = row[1];
    poly.vertices.push_back(v);
  }
  if (poly.vertices.size() < 3) throw Error("config: polygon needs at least 3 vertices");
  return poly;
}

std::vector<Polygon> regions_from_config(const ConfigMap& cfg) {
  std::vector<Polygon> regions;
  if (cfg.has("task.region_rect")) {
    auto r = cfg.numbers("task.region_rect");
    if (r.size() != 4) throw Error("config: task.region_rect must be [x0, y0, x1, y1]");
    regions.push_back(Polygon::rectangle(r[0], r[1], r[2], r[3]));
  }
  if (cfg.has("task.region")) regions.push_back(polygon_from_rows(cfg.number_rows("task.region")));
  if (regions.empty()) throw Error("config: no region given (task.region or task.region_rect)");
  return regions;
}

Problem problem_from_config(const ConfigMap& cfg, const std::string& config_dir) {
  Problem problem{gf_from_config(cfg), "none", GridPotential(), SemiDiscretePotential()};
  std::string kind = cfg.text_or("potential.kind", "none");
  problem.potential_kind = kind;
  if (kind == "none") return problem;

  const auto& gf = problem.gf;
  int nodes = static_cast<int>(cfg.number_or("potential.nodes", 65));
  Vec lo = gf.domain().x_lo, hi = gf.domain().x_hi;
  if (cfg.has("potential.grid_min")) {
    auto v = cfg.numbers("potential.grid_min");
    auto w = cfg.numbers("potential.grid_max");
    lo[0] = v[0];
    lo[1] = v[1];
    hi[0] = w[0];
    hi[1] = w[1];
  }
  Vec ax0 = GridPotential::linspace(lo[0], hi[0], nodes);
  Vec ax1 = GridPotential::linspace(lo[1], hi[1], nodes);

  if (kind == "grid-file") {
    std::string file = cfg.text("potential.grid_file");
    if (!file.empty() && file[0] != '/') file = config_dir + "/" + file;
    problem.u = grid_load(file);
    return problem;
  }
  if (kind == "semi-discrete") {
    auto rows = cfg.number_rows("potential.supports");
    for (const auto& row : rows) {
      if (row.size() != 3) throw Error("config: supports rows must be [y1, y2, z]");
      Vec y(2);
      y[0] = row[0];
      y[1] = row[1];
      problem.semi_discrete.ys.push_back(y);
      problem.semi_discrete.zs.push_back(row[2]);
    }
    if (problem.semi_discrete.ys.empty()) throw Error("config: empty support list");
    problem.u = problem.semi_discrete.sample(gf, ax0, ax1);
    return problem;
  }
  if (kind == "preset") {
    std::string preset = cfg.text("potential.preset");
    double a = cfg.number_or("potential.coeff", 1.0);
    std::function<double(const Vec&)> fn;
    if (preset == "quadratic") {
      fn = [a](const Vec& x) { return 0.5 * a * x.squaredNorm(); };
    } else if (preset == "abs-x1") {
      fn = [](const Vec& x) { return std::abs(x[0]); };
    } else if (preset == "flat-x1") {
      fn = [a](const Vec& x) { return 0.5 * a * x[0] * x[0]; };
    } else if (preset == "quartic") {
      fn = [a](const Vec& x) {
        return 0.5 * x.squaredNorm() + a * (std::pow(x[0], 4) + std::pow(x[1], 4));
      };
    } else if (preset == "affine") {
      auto coeffs = cfg.numbers("potential.affine");
      if (coeffs.size() != 3) throw Error("config: potential.affine must be [b1, b2, c]");
      fn = [coeffs](const Vec& x) {
        return coeffs[0] * x[0] + coeffs[1] * x[1] + coeffs[2];
      };
    } else {
      throw Error("config: unknown potential preset '" + preset + "'");
    }
    problem.u = GridPotential::from_function(ax0, ax1, fn);
    return problem;
  }
  throw Error("config: unknown potential.kind '" + kind + "'");
}

}  // namespace gje
