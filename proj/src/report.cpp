#include "gje/report.hpp"

#include "gje/version.hpp"

namespace gje {

OJson vec_json(const Vec& v) {
  OJson arr = OJson::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

OJson report_json(const ValidationReport& r) {
  OJson j;
  j["pass"] = r.pass();
  j["a0"] = r.a0_ok;
  j["a1"] = r.a1_ok;
  j["a2"] = r.a2_ok;
  j["worst_gz"] = r.worst_gz;
  j["worst_gz_point"] = {{"x", vec_json(r.worst_gz_point.x)},
                         {"y", vec_json(r.worst_gz_point.y)},
                         {"z", r.worst_gz_point.z}};
  j["min_abs_detE"] = r.min_abs_detE;
  j["det_floor"] = r.det_floor;
  j["samples"] = r.samples;
  j["a1_probes"] = r.a1_probes;
  j["a1_failures"] = r.a1_failures;
  j["seed"] = r.seed;
  OJson det = OJson::array();
  for (const auto& d : r.a1_detections)
    det.push_back({{"x", vec_json(d.x)},
                   {"u", d.u},
                   {"p", vec_json(d.p)},
                   {"y_a", vec_json(d.y_a)},
                   {"z_a", d.z_a},
                   {"y_b", vec_json(d.y_b)},
                   {"z_b", d.z_b}});
  j["a1_detections"] = det;
  return j;
}

namespace {
OJson witness_json(const ConditionWitness& w) {
  OJson j;
  j["x"] = vec_json(w.x);
  j["u"] = w.u;
  j["p"] = vec_json(w.p);
  j["xi"] = vec_json(w.xi);
  j["eta"] = vec_json(w.eta);
  j["value"] = w.value;
  return j;
}
}  // namespace

OJson report_json(const ConditionReport& r) {
  OJson j;
  j["a3w_pass"] = r.a3w_pass();
  j["a4w_pass"] = r.a4w_pass();
  j["worst_a3w"] = r.worst_a3w;
  j["worst_a4w"] = r.worst_a4w;
  j["k_est"] = r.k_est;
  j["points"] = r.points;
  j["skipped"] = r.skipped;
  j["direction_pairs"] = r.direction_pairs;
  j["pass_tolerance"] = r.pass_tolerance;
  j["seed"] = r.seed;
  j["a3w_witness"] = witness_json(r.a3w_witness);
  j["a4w_witness"] = witness_json(r.a4w_witness);
  return j;
}

OJson report_json(const GSegment& s) {
  OJson j;
  j["y0"] = vec_json(s.y0);
  j["z0"] = s.z0;
  j["theta_min"] = s.theta_min;
  j["theta_max"] = s.theta_max;
  j["samples"] = static_cast<long>(s.samples.size());
  j["max_residual"] = s.max_residual();
  j["q0"] = vec_json(s.q0);
  j["q1"] = vec_json(s.q1);
  return j;
}

OJson report_json(const GConvexityVerdict& v) {
  OJson j;
  j["pass"] = v.pass;
  j["segments_checked"] = v.segments_checked;
  j["segment_failures"] = v.segment_failures;
  if (v.witness) {
    j["witness"] = {{"x_start", vec_json(v.witness->x_start)},
                    {"x_end", vec_json(v.witness->x_end)},
                    {"y", vec_json(v.witness->y)},
                    {"z", v.witness->z},
                    {"theta", v.witness->theta},
                    {"x_exit", vec_json(v.witness->x_exit)}};
  }
  return j;
}

OJson report_json(const HeightTrace& t) {
  OJson j;
  j["y0"] = vec_json(t.y0);
  j["z0"] = t.z0;
  j["sigma"] = t.sigma;
  j["K_lemma"] = t.K_lemma;
  j["samples"] = static_cast<long>(t.samples.size());
  j["contact_failures"] = t.contact_failures;
  long violations = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < t.samples.size(); ++k) {
    if (!t.interior(static_cast<int>(k)) || !t.samples[k].contact_ok) continue;
    double slack = t.samples[k].h_second - t.samples[k].rhs.total_conservative;
    if (slack < -1e-4) ++violations;
    worst = std::min(worst, slack);
  }
  j["inequality_violations"] = violations;
  j["worst_slack"] = worst;
  return j;
}

OJson report_json(const MeasureReport& r) {
  OJson j;
  j["method"] =
      r.method == MeasureMethod::JacobianQuadrature ? "jacobian-quadrature" : "dual-box-counting";
  j["region_area"] = r.region_area;
  j["mu"] = r.mu;
  j["ratio"] = r.region_area > 0 ? r.mu / r.region_area : 0.0;
  if (r.method == MeasureMethod::JacobianQuadrature) {
    j["cells_used"] = r.cells_used;
    j["negative_cells"] = r.negative_cells;
    j["solver_failures"] = r.solver_failures;
    j["g_convex_sampled"] = r.g_convex_sampled;
  } else {
    j["marked_cells"] = r.marked_cells;
    j["mu_coarse"] = r.mu_coarse;
    j["marked_cells_coarse"] = r.marked_cells_coarse;
    j["inadmissible_pairs"] = r.inadmissible_pairs;
    j["invalid_dual_nodes"] = r.invalid_dual_nodes;
  }
  j["notes"] = r.notes;
  return j;
}

OJson report_json(const AlexandrovVerdict& v) {
  OJson j;
  j["lower_pass"] = v.lower_pass;
  j["upper_pass"] = v.upper_pass;
  OJson rows = OJson::array();
  for (const auto& row : v.rows) {
    OJson rj;
    rj["measure"] = report_json(row.report);
    rj["lower"] = {{"pass", row.lower.pass}, {"ratio", row.lower.ratio},
                   {"margin", row.lower.margin}};
    rj["upper"] = {{"pass", row.upper.pass}, {"ratio", row.upper.ratio},
                   {"margin", row.upper.margin}};
    rows.push_back(rj);
  }
  j["rows"] = rows;
  return j;
}

OJson report_json(const ProbeReport& r) {
  OJson j;
  j["verdict"] = to_string(r.verdict);
  j["H"] = r.H;
  j["implied_H_lower"] = r.implied_H_lower;
  j["sigma"] = r.sigma;
  j["delta"] = r.delta;
  j["support"] = {{"y0", vec_json(r.y0)}, {"z0", r.z0}};
  j["endpoints"] = {{"x_m1", vec_json(r.x_m1)}, {"x_1", vec_json(r.x_1)}};
  j["integral_I"] = r.integral_I;
  j["trace_integral"] = r.trace_integral;
  j["trace_bound"] = r.trace_bound;
  j["jensen_rhs"] = r.jensen_rhs;
  j["jensen_diverges"] = r.jensen_diverges;
  j["cofactor_ok"] = r.cofactor_ok;
  j["elliptic_ok"] = r.elliptic_ok;
  j["max_principle_ok"] = r.max_principle_ok;
  j["support_ok"] = r.support_ok;
  j["contact_failures"] = r.contact_failures;
  j["clamped_denominators"] = r.clamped_denominators;
  OJson ledger = OJson::array();
  for (const auto& entry : r.constants)
    ledger.push_back(
        {{"name", entry.name}, {"value", entry.value}, {"provenance", entry.provenance}});
  j["constants"] = ledger;
  j["flags"] = r.flags;
  return j;
}

OJson report_json(const C1Report& r) {
  OJson j;
  j["verdict"] = r.not_c1 ? "NOT_C1" : "C1_PLAUSIBLE";
  j["max_extent"] = r.max_extent;
  j["image_coverage"] = r.image_coverage;
  j["invalid_nodes"] = r.invalid_nodes;
  OJson ws = OJson::array();
  for (const auto& w : r.witnesses)
    ws.push_back({{"x", vec_json(w.x)},
                  {"extent", w.extent},
                  {"count", w.count},
                  {"y_lo", vec_json(w.y_lo)},
                  {"y_hi", vec_json(w.y_hi)}});
  j["witnesses"] = ws;
  return j;
}

OJson report_json(const SuiteSummary& s) {
  OJson j;
  j["violations"] = s.violations;
  j["seed"] = s.seed;
  OJson rows = OJson::array();
  for (const auto& row : s.rows) {
    OJson rj;
    rj["fixture"] = row.fixture;
    rj["lower_pass"] = row.lower_pass;
    rj["upper_pass"] = row.upper_pass;
    rj["a3w_pass"] = row.a3w_pass;
    rj["a4w_pass"] = row.a4w_pass;
    rj["domain_gconvex_pass"] = row.domain_gconvex_pass;
    rj["bvp2_pass"] = row.bvp2_pass;
    rj["target_gstar_convex"] = row.target_gstar_convex;
    rj["probe_verdict"] = to_string(row.probe_verdict);
    rj["H"] = row.H;
    rj["implied_H_lower"] = row.implied_H_lower;
    rj["not_c1"] = row.not_c1;
    rj["theorem_violation"] = row.theorem_violation;
    rj["corollary_violation"] = row.corollary_violation;
    rj["failed_hypotheses"] = row.failed_hypotheses;
    rows.push_back(rj);
  }
  j["rows"] = rows;
  return j;
}

uint64_t fnv1a(const std::string& bytes) {
  uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

OJson report_envelope(const std::string& subcommand, const std::string& config_hash,
                      uint64_t seed, OJson body) {
  OJson j;
  j["tool"] = "gje";
  j["version"] = kVersion;
  j["subcommand"] = subcommand;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["report"] = std::move(body);
  return j;
}

}  // namespace gje
