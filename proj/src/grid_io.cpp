#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gje/grid.hpp"

namespace gje {

namespace {

Vec parse_row(const std::string& line) {
  std::vector<double> vals;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) vals.push_back(std::stod(cell));
  }
  Vec v(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
  return v;
}

void write_row(std::ostream& out, const Eigen::Ref<const Vec>& v) {
  for (int i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    char buf[32];
    snprintf(buf, sizeof buf, "%.17g", v[i]);
    out << buf;
  }
  out << '\n';
}

}  // namespace

GridPotential grid_from_csv(std::istream& in) {
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    rows.push_back(line);
  }
  if (rows.size() < 3) throw Error("grid csv: need two axis rows and at least one value row");
  Vec axis0 = parse_row(rows[0]);
  Vec axis1 = parse_row(rows[1]);
  if (static_cast<int>(rows.size()) - 2 != axis0.size())
    throw Error("grid csv: value row count does not match axis 0");
  Mat values(axis0.size(), axis1.size());
  for (int i = 0; i < axis0.size(); ++i) {
    Vec row = parse_row(rows[2 + i]);
    if (row.size() != axis1.size()) throw Error("grid csv: ragged value row");
    values.row(i) = row.transpose();
  }
  return GridPotential(axis0, axis1, std::move(values));
}

void grid_to_csv(const GridPotential& g, std::ostream& out) {
  out << "# grid potential: axis0 row, axis1 row, then one value row per axis0 node\n";
  write_row(out, g.axis0());
  write_row(out, g.axis1());
  for (int i = 0; i < g.n0(); ++i) write_row(out, g.values().row(i).transpose());
}

GridPotential grid_from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("axes") || !j.contains("values"))
    throw Error("grid json: expected {axes, values}");
  auto axes = j["axes"];
  Vec axis0(axes[0].size()), axis1(axes[1].size());
  for (std::size_t i = 0; i < axes[0].size(); ++i) axis0[i] = axes[0][i].get<double>();
  for (std::size_t i = 0; i < axes[1].size(); ++i) axis1[i] = axes[1][i].get<double>();
  Mat values(axis0.size(), axis1.size());
  auto rows = j["values"];
  if (static_cast<int>(rows.size()) != axis0.size())
    throw Error("grid json: value rows do not match axis 0");
  for (int i = 0; i < axis0.size(); ++i)
    for (int k = 0; k < axis1.size(); ++k) values(i, k) = rows[i][k].get<double>();
  return GridPotential(axis0, axis1, std::move(values));
}

std::string grid_to_json_text(const GridPotential& g) {
  nlohmann::ordered_json j;
  j["axes"] = {std::vector<double>(g.axis0().begin(), g.axis0().end()),
               std::vector<double>(g.axis1().begin(), g.axis1().end())};
  std::vector<std::vector<double>> rows(g.n0());
  for (int i = 0; i < g.n0(); ++i) {
    rows[i].resize(g.n1());
    for (int k = 0; k < g.n1(); ++k) rows[i][k] = g.values()(i, k);
  }
  j["values"] = rows;
  return j.dump(2);
}

GridPotential grid_load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open grid file: " + path);
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    std::stringstream ss;
    ss << in.rdbuf();
    return grid_from_json_text(ss.str());
  }
  return grid_from_csv(in);
}

void grid_save(const GridPotential& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write grid file: " + path);
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
    out << grid_to_json_text(g) << '\n';
  else
    grid_to_csv(g, out);
}

}  // namespace gje
