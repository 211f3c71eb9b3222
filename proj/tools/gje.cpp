#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gje/config.hpp"
#include "gje/mate.hpp"
#include "gje/report.hpp"
#include "gje/version.hpp"

using namespace gje;

namespace {

struct Common {
  std::string config_path;
  std::string out_path;
  std::string csv_path;
  uint64_t seed = 0;
  bool seed_given = false;
  bool strict = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& common, bool config_required = true) {
  auto* opt = cmd->add_option("--config", common.config_path, "problem config (.toml or .json)");
  if (config_required) opt->required();
  cmd->add_option("--out", common.out_path, "report path (default: stdout)");
  cmd->add_option("--csv", common.csv_path, "trace output path (subcommand-specific)");
  cmd->add_option("--seed", common.seed, "seed override")->each([&common](const std::string&) {
    common.seed_given = true;
  });
  cmd->add_flag("--strict", common.strict, "exit 1 when a verdict fails");
  cmd->add_option("--threads", common.threads, "worker thread cap (default: cores)");
}

std::string dir_of(const std::string& path) {
  auto slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

Vec vec_of(const std::vector<double>& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

OJson mat_json(const Mat& m) {
  OJson rows = OJson::array();
  for (int i = 0; i < m.rows(); ++i) {
    OJson row = OJson::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

void emit(const Common& common, const OJson& report) {
  std::string text = report.dump(2);
  if (common.out_path.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream out(common.out_path);
    if (!out) throw Error("cannot write report: " + common.out_path);
    out << text << '\n';
  }
}

uint64_t pick_seed(const Common& common, const ConfigMap& cfg) {
  if (common.seed_given) return common.seed;
  return static_cast<uint64_t>(cfg.number_or("seed", 20240601));
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write csv: " + path);
  out << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      char buf[32];
      snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << buf;
    }
    out << '\n';
  }
}

int run_command(const std::string& name, const Common& common) {
  std::string raw;
  ConfigMap cfg;
  if (!common.config_path.empty()) {
    cfg = ConfigMap::load(common.config_path, &raw);
  }
  char hash_text[32];
  snprintf(hash_text, sizeof hash_text, "fnv1a-%016llx",
           static_cast<unsigned long long>(fnv1a(raw)));
  uint64_t seed = pick_seed(common, cfg);
  bool failed_verdict = false;
  OJson body;

  if (name == "validate") {
    auto gf = gf_from_config(cfg);
    ValidationGrid grid;
    grid.x_res = static_cast<int>(cfg.number_or("task.x_res", 5));
    grid.y_res = static_cast<int>(cfg.number_or("task.y_res", 5));
    grid.z_res = static_cast<int>(cfg.number_or("task.z_res", 5));
    grid.a1_points = static_cast<int>(cfg.number_or("task.a1_points", 20));
    grid.a1_seeds = static_cast<int>(cfg.number_or("task.a1_seeds", 8));
    grid.seed = seed;
    ValidationReport rep = validate_assumptions(gf, grid);
    failed_verdict = !rep.pass();
    body = report_json(rep);
  } else if (name == "check-conditions") {
    auto gf = gf_from_config(cfg);
    ScanOptions opts;
    opts.x_res = static_cast<int>(cfg.number_or("task.x_res", 4));
    opts.y_res = static_cast<int>(cfg.number_or("task.y_res", 4));
    opts.z_res = static_cast<int>(cfg.number_or("task.z_res", 4));
    opts.random_pairs = static_cast<int>(cfg.number_or("task.random_pairs", 16));
    opts.k_tuples = static_cast<int>(cfg.number_or("task.k_tuples", 64));
    opts.seed = seed;
    ConditionReport rep = scan_conditions(gf, opts);
    failed_verdict = !(rep.a3w_pass() && rep.a4w_pass());
    body = report_json(rep);
  } else if (name == "segment") {
    auto gf = gf_from_config(cfg);
    SegmentOptions opts;
    opts.resolution = static_cast<int>(cfg.number_or("task.resolution", 129));
    GSegment seg = g_segment(gf, vec_of(cfg.numbers("task.x_start")),
                             vec_of(cfg.numbers("task.x_end")), vec_of(cfg.numbers("task.y0")),
                             cfg.number("task.z0"), opts);
    body = report_json(seg);
    if (!common.csv_path.empty()) {
      std::vector<std::vector<double>> rows;
      for (const auto& s : seg.samples)
        rows.push_back({s.theta, s.x[0], s.x[1], s.xdot[0], s.xdot[1], s.residual});
      write_csv(common.csv_path, "theta,x0,x1,xdot0,xdot1,residual", rows);
    }
  } else if (name == "transform") {
    Problem problem = problem_from_config(cfg, dir_of(common.config_path));
    if (!problem.has_potential()) throw Error("transform: config must define a potential");
    int nodes = static_cast<int>(cfg.number_or("task.dual_nodes", 65));
    Vec lo = problem.gf.domain().y_lo, hi = problem.gf.domain().y_hi;
    if (cfg.has("task.dual_min")) {
      lo = vec_of(cfg.numbers("task.dual_min"));
      hi = vec_of(cfg.numbers("task.dual_max"));
    }
    TransformResult tr =
        g_star_transform(problem.gf, problem.u, GridPotential::linspace(lo[0], hi[0], nodes),
                         GridPotential::linspace(lo[1], hi[1], nodes));
    body["dual_nodes"] = nodes;
    body["invalid_nodes"] = tr.invalid_nodes;
    body["skipped_points"] = tr.skipped_points;
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    for (int i = 0; i < tr.n0(); ++i)
      for (int j = 0; j < tr.n1(); ++j)
        if (tr.valid[tr.flat(i, j)]) {
          vmin = std::min(vmin, tr.values(i, j));
          vmax = std::max(vmax, tr.values(i, j));
        }
    body["value_min"] = vmin;
    body["value_max"] = vmax;
    if (!common.csv_path.empty()) {
      std::ofstream out(common.csv_path);
      if (!out) throw Error("cannot write csv: " + common.csv_path);
      grid_to_csv(GridPotential(tr.axis0, tr.axis1, tr.values), out);
    }
  } else if (name == "mate") {
    auto gf = gf_from_config(cfg);
    Vec x = vec_of(cfg.numbers("task.x"));
    double u = cfg.number("task.u");
    Vec p = vec_of(cfg.numbers("task.p"));
    MateCoefficients mc = mate_coefficients(gf, x, u, p);
    body["E"] = mat_json(mc.E);
    body["E_inv"] = mat_json(mc.E_inv);
    body["detE"] = mc.detE;
    body["A"] = mat_json(mc.A);
    body["B"] = mc.B;
    body["contact_y"] = vec_json(mc.contact.y);
    body["contact_z"] = mc.contact.z;
    body["E_vs_DpY"] = check_E_is_DpY(gf, x, u, p);
  } else if (name == "height") {
    Problem problem = problem_from_config(cfg, dir_of(common.config_path));
    if (!problem.has_potential()) throw Error("height: config must define a potential");
    SegmentOptions sopts;
    sopts.resolution = static_cast<int>(cfg.number_or("task.resolution", 129));
    GSegment seg = g_segment(problem.gf, vec_of(cfg.numbers("task.x_start")),
                             vec_of(cfg.numbers("task.x_end")),
                             vec_of(cfg.numbers("task.y0")), cfg.number("task.z0"), sopts);
    HeightTrace trace = height_trace(problem.gf, problem.u, seg,
                                     cfg.number_or("task.sigma", 0.0));
    body = report_json(trace);
    if (!common.csv_path.empty()) {
      std::vector<std::vector<double>> rows;
      for (const auto& s : trace.samples)
        rows.push_back({s.theta, s.h, s.h_prime, s.h_second, s.rhs.total_conservative});
      write_csv(common.csv_path, "theta,h,h_prime,h_second,rhs_lower", rows);
    }
  } else if (name == "measure") {
    Problem problem = problem_from_config(cfg, dir_of(common.config_path));
    if (!problem.has_potential()) throw Error("measure: config must define a potential");
    std::vector<Polygon> regions = regions_from_config(cfg);
    std::string method = cfg.text_or("task.method", "both");
    double c = cfg.number_or("task.c", 0.0);
    double cap = cfg.number_or("task.C", std::numeric_limits<double>::infinity());
    OJson verdicts = OJson::array();
    bool all_pass = true;
    auto run_method = [&](const std::string& label) {
      std::vector<MeasureReport> reports;
      for (const auto& region : regions) {
        if (label == "smooth") {
          reports.push_back(gma_measure_smooth(problem.gf, problem.u, region));
        } else {
          DualMeasureOptions opts;
          opts.dual_resolution = static_cast<int>(cfg.number_or("task.dual_resolution", 128));
          if (cfg.has("task.dual_min")) {
            opts.dual_lo = vec_of(cfg.numbers("task.dual_min"));
            opts.dual_hi = vec_of(cfg.numbers("task.dual_max"));
          }
          reports.push_back(gma_measure_nonsmooth(problem.gf, problem.u, region, opts));
        }
      }
      AlexandrovVerdict verdict = alexandrov_verdict(reports, c, cap);
      all_pass = all_pass && verdict.lower_pass && verdict.upper_pass;
      OJson vj = report_json(verdict);
      vj["method"] = label;
      verdicts.push_back(vj);
    };
    if (method == "smooth" || method == "both") run_method("smooth");
    if (method == "dual" || method == "both") run_method("dual");
    body["c"] = c;
    body["C"] = cap;
    body["verdicts"] = verdicts;
    failed_verdict = !all_pass;
  } else if (name == "probe") {
    Problem problem = problem_from_config(cfg, dir_of(common.config_path));
    if (!problem.has_potential()) throw Error("probe: config must define a potential");
    ProbeOptions opts;
    opts.sigma = cfg.number_or("task.sigma", -1.0);
    opts.delta = cfg.number_or("task.delta", -1.0);
    opts.theta_resolution = static_cast<int>(cfg.number_or("task.theta_resolution", 129));
    opts.epsilon_resolution = static_cast<int>(cfg.number_or("task.epsilon_resolution", 33));
    opts.flip_normal = cfg.boolean_or("task.flip_normal", false);
    Vec y0 = vec_of(cfg.numbers("task.y0"));
    double z0 = cfg.number("task.z0");
    Vec x_m1 = vec_of(cfg.numbers("task.x_m1"));
    Vec x_1 = vec_of(cfg.numbers("task.x_1"));
    ProbeReport rep = strict_convexity_probe(problem.gf, problem.u, y0, z0, x_m1, x_1, opts);
    failed_verdict = rep.verdict != ProbeVerdict::Strict;
    body = report_json(rep);
    if (!common.csv_path.empty()) {
      SegmentOptions sopts;
      sopts.resolution = opts.theta_resolution;
      sopts.theta_min = -1.0;
      sopts.theta_max = 1.0;
      GSegment base = g_segment(problem.gf, x_m1, x_1, y0, z0, sopts);
      std::vector<std::vector<double>> rows;
      for (const auto& s : base.samples)
        rows.push_back({s.theta, s.x[0], s.x[1],
                        problem.u.value(s.x) - problem.gf.eval(s.x, y0, z0) - rep.sigma});
      write_csv(common.csv_path, "theta,x0,x1,h_sigma", rows);
    }
  } else if (name == "c1") {
    Problem problem = problem_from_config(cfg, dir_of(common.config_path));
    if (!problem.has_potential()) throw Error("c1: config must define a potential");
    C1Options opts;
    opts.dual_resolution = static_cast<int>(cfg.number_or("task.dual_resolution", 128));
    opts.separation = cfg.number_or("task.separation", 0.25);
    if (cfg.has("task.dual_min")) {
      opts.dual_lo = vec_of(cfg.numbers("task.dual_min"));
      opts.dual_hi = vec_of(cfg.numbers("task.dual_max"));
    }
    C1Report rep = c1_check(problem.gf, problem.u, opts);
    failed_verdict = rep.not_c1;
    body = report_json(rep);
  } else if (name == "suite") {
    std::vector<Fixture> fixtures = builtin_fixture_set();
    if (cfg.has("task.fixtures")) {
      auto names = cfg.texts("task.fixtures");
      std::vector<Fixture> filtered;
      for (auto& f : fixtures)
        for (const auto& n : names)
          if (f.name == n) filtered.push_back(f);
      if (filtered.empty()) throw Error("suite: no fixtures match task.fixtures");
      fixtures = std::move(filtered);
    }
    if (cfg.has("task.dual_resolution")) {
      int res = static_cast<int>(cfg.number("task.dual_resolution"));
      for (auto& f : fixtures) f.dual_resolution = res;
    }
    SuiteSummary summary = theorem_consistency_suite(fixtures, seed);
    failed_verdict = summary.violations > 0;
    body = report_json(summary);
  } else {
    throw Error("unknown subcommand: " + name);
  }

  emit(common, report_envelope(name, hash_text, seed, std::move(body)));
  return (common.strict && failed_verdict) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gje: generating functions, their induced maps, and the 2D convexity probes"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  const std::vector<std::string> commands = {"validate", "check-conditions", "segment",
                                             "transform", "mate",            "height",
                                             "measure",  "probe",            "c1",
                                             "suite"};
  std::map<std::string, Common> common_of;
  for (const auto& name : commands) {
    auto* cmd = app.add_subcommand(name);
    add_common(cmd, common_of[name], name != "suite");
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& name : commands) {
    if (!app.get_subcommand(name)->parsed()) continue;
    const Common& common = common_of[name];
    if (common.threads > 0) {
      setenv("GJE_THREADS", std::to_string(common.threads).c_str(), 1);
    }
    try {
      return run_command(name, common);
    } catch (const Error& e) {
      std::cerr << "gje " << name << ": " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "gje " << name << ": unexpected error: " << e.what() << '\n';
      return 2;
    }
  }
  return 2;
}
