#include <cmath>

#include "gje/conditions.hpp"
#include "gje/probe.hpp"

namespace gje {

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v[0] = a;
  v[1] = b;
  return v;
}

GridPotential grid_of(const std::function<double(const Vec&)>& fn, double half = 1.0,
                      int nodes = 65) {
  Vec ax = GridPotential::linspace(-half, half, nodes);
  return GridPotential::from_function(ax, ax, fn);
}

Fixture base_fixture(std::string name, GeneratingFunction gf, GridPotential u) {
  Fixture f{std::move(name),
            std::move(gf),
            std::move(u),
            0.0,
            0.0,
            {},
            Vec(),
            0.0,
            Vec(),
            Vec(),
            Polygon(),
            Vec(),
            Vec(),
            96,
            ProbeOptions{}};
  return f;
}

}  // namespace

std::vector<Fixture> builtin_fixture_set() {
  std::vector<Fixture> fixtures;

  // Quadratic bowl under the classical generating function: every
  // hypothesis holds, the probe must report strict convexity.
  {
    DomainBox box = DomainBox::cube(2, -1.0, 1.0, -1.2, 1.2, -8.0, 8.0);
    Fixture f = base_fixture("bilinear-quadratic", builtin("bilinear", {}, 2, box),
                             grid_of([](const Vec& x) { return 0.5 * x.squaredNorm(); }));
    f.claimed_c = 0.5;
    f.claimed_C = 2.0;
    f.regions = {Polygon::rectangle(-0.5, -0.5, 0.5, 0.5),
                 Polygon::rectangle(0.1, -0.4, 0.6, 0.3)};
    f.probe_y0 = v2(0, 0);
    f.probe_z0 = 0.0;
    f.probe_x_m1 = v2(-0.5, 0.0);
    f.probe_x_1 = v2(0.5, 0.0);
    f.domain_region = Polygon::rectangle(-0.95, -0.95, 0.95, 0.95);
    f.dual_lo = v2(-1.0, -1.0);
    f.dual_hi = v2(1.0, 1.0);
    fixtures.push_back(std::move(f));
  }

  // Kink potential |x1|: the measure collapses onto a null set, so the lower
  // bound fails and the probe degenerates along the crease.
  {
    Fixture f = base_fixture("bilinear-kink", builtin("bilinear"),
                             grid_of([](const Vec& x) { return std::abs(x[0]); }, 1.0, 129));
    f.claimed_c = 0.1;
    f.claimed_C = 2.0;
    f.regions = {Polygon::rectangle(-0.2, -0.8, 0.2, 0.8)};
    f.probe_y0 = v2(0, 0);
    f.probe_z0 = 0.0;
    f.probe_x_m1 = v2(0.0, -0.5);
    f.probe_x_1 = v2(0.0, 0.5);
    f.domain_region = Polygon::rectangle(-0.95, -0.95, 0.95, 0.95);
    f.dual_lo = v2(-1.0, -1.0);
    f.dual_hi = v2(1.0, 1.0);
    fixtures.push_back(std::move(f));
  }

  // Steep bowl |x|^2: the upper bound with C = 3 fails (the ratio is 4),
  // while the lower-bound chain still forces strictness.
  {
    DomainBox box = DomainBox::cube(2, -1.0, 1.0, -2.4, 2.4, -8.0, 8.0);
    Fixture f = base_fixture("bilinear-steep", builtin("bilinear", {}, 2, box),
                             grid_of([](const Vec& x) { return x.squaredNorm(); }));
    f.claimed_c = 1.0;
    f.claimed_C = 3.0;
    f.regions = {Polygon::rectangle(-0.4, -0.4, 0.4, 0.4)};
    f.probe_y0 = v2(0, 0);
    f.probe_z0 = 0.0;
    f.probe_x_m1 = v2(-0.5, 0.0);
    f.probe_x_1 = v2(0.5, 0.0);
    f.domain_region = Polygon::rectangle(-0.95, -0.95, 0.95, 0.95);
    f.dual_lo = v2(-2.0, -2.0);
    f.dual_hi = v2(2.0, 2.0);
    fixtures.push_back(std::move(f));
  }

  // Quadratic bowl under the quadratic cost: contacts shift to y = 2x and
  // the coefficient matrix A = -I enters every formula.
  {
    DomainBox box = DomainBox::cube(2, -1.0, 1.0, -2.4, 2.4, -12.0, 12.0);
    Fixture f = base_fixture("quadcost-quadratic", builtin("quad-cost", {}, 2, box),
                             grid_of([](const Vec& x) { return 0.5 * x.squaredNorm(); }));
    f.claimed_c = 1.0;
    f.claimed_C = 5.0;
    f.regions = {Polygon::rectangle(-0.4, -0.4, 0.4, 0.4)};
    f.probe_y0 = v2(0, 0);
    f.probe_z0 = 0.0;
    f.probe_x_m1 = v2(-0.5, 0.0);
    f.probe_x_1 = v2(0.5, 0.0);
    f.domain_region = Polygon::rectangle(-0.95, -0.95, 0.95, 0.95);
    f.dual_lo = v2(-2.0, -2.0);
    f.dual_hi = v2(2.0, 2.0);
    fixtures.push_back(std::move(f));
  }

  // Two-support envelope under the logarithmic cost: genuinely g-convex by
  // construction, atomic measure, a crease between the active regions, and
  // a family that the A3w scan itself rejects.
  {
    auto gf = builtin("log-cost");
    Vec ya = v2(2.3, 2.4), yb = v2(2.7, 2.6);
    Vec xc = v2(0.5, 0.5);
    double za = -0.5 * std::log((xc - ya).squaredNorm());
    double zb = -0.5 * std::log((xc - yb).squaredNorm());
    SemiDiscretePotential sd;
    sd.ys = {ya, yb};
    sd.zs = {za, zb};
    Vec ax = GridPotential::linspace(0.0, 1.0, 129);
    Fixture f = base_fixture("logcost-twosupport", gf, sd.sample(gf, ax, ax));
    f.claimed_c = 0.05;
    f.claimed_C = 2.0;
    f.regions = {Polygon::rectangle(0.2, 0.2, 0.8, 0.8)};
    f.probe_y0 = ya;
    f.probe_z0 = za;
    f.probe_x_m1 = v2(0.7, 0.85);
    f.probe_x_1 = v2(0.9, 0.6);
    f.domain_region = Polygon::rectangle(0.05, 0.05, 0.95, 0.95);
    f.dual_lo = v2(2.0, 2.0);
    f.dual_hi = v2(3.0, 3.0);
    fixtures.push_back(std::move(f));
  }

  // One flat direction under the quadratic cost: still strictly g-convex
  // because the cost supplies curvature the potential lacks.
  {
    DomainBox box = DomainBox::cube(2, -1.0, 1.0, -2.4, 2.4, -12.0, 12.0);
    Fixture f = base_fixture("quadcost-anisotropic", builtin("quad-cost", {}, 2, box),
                             grid_of([](const Vec& x) { return 0.5 * x[0] * x[0]; }));
    f.claimed_c = 1.0;
    f.claimed_C = 3.0;
    f.regions = {Polygon::rectangle(-0.4, -0.4, 0.4, 0.4)};
    f.probe_y0 = v2(0, 0);
    f.probe_z0 = 0.0;
    f.probe_x_m1 = v2(-0.5, 0.0);
    f.probe_x_1 = v2(0.5, 0.0);
    f.domain_region = Polygon::rectangle(-0.95, -0.95, 0.95, 0.95);
    f.dual_lo = v2(-2.0, -1.0);
    f.dual_hi = v2(2.0, 1.0);
    fixtures.push_back(std::move(f));
  }

  // The same flat potential under the classical generating function: the
  // measure vanishes and the flat segment is exactly the degenerate case.
  {
    DomainBox box = DomainBox::cube(2, -1.0, 1.0, -1.2, 1.2, -8.0, 8.0);
    Fixture f = base_fixture("bilinear-flat", builtin("bilinear", {}, 2, box),
                             grid_of([](const Vec& x) { return 0.5 * x[0] * x[0]; }));
    f.claimed_c = 0.5;
    f.claimed_C = 2.0;
    f.regions = {Polygon::rectangle(-0.4, -0.4, 0.4, 0.4)};
    f.probe_y0 = v2(0, 0);
    f.probe_z0 = 0.0;
    f.probe_x_m1 = v2(0.0, -0.5);
    f.probe_x_1 = v2(0.0, 0.5);
    f.domain_region = Polygon::rectangle(-0.95, -0.95, 0.95, 0.95);
    f.dual_lo = v2(-1.0, -1.0);
    f.dual_hi = v2(1.0, 1.0);
    fixtures.push_back(std::move(f));
  }

  return fixtures;
}

namespace {

// Contact parameters (y, z) collected from interior grid points; these are
// the sampled Y_u / Z_u images the convexity hypotheses quantify over.
void sample_contacts(const GeneratingFunction& gf, const GridPotential& u,
                     std::vector<Vec>& ys, std::vector<double>& zs) {
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) {
      int i = a * (u.n0() - 1) / 4;
      int j = b * (u.n1() - 1) / 4;
      Vec x = u.node_point(i, j);
      try {
        double uval;
        Vec du;
        u.eval_all(x, &uval, &du, nullptr);
        ContactState cs = solve_YZ(gf, x, uval, du);
        ys.push_back(cs.y);
        zs.push_back(cs.z);
      } catch (const Error&) {
        // Kinked potentials can push contacts outside; skipped samples are
        // simply not part of the hypothesis scan.
      }
    }
}

}  // namespace

SuiteSummary theorem_consistency_suite(const std::vector<Fixture>& fixtures, uint64_t seed) {
  SuiteSummary summary;
  summary.seed = seed;

  for (const Fixture& f : fixtures) {
    SuiteRow row;
    row.fixture = f.name;

    // Measure bounds from the definition-faithful dual box counting.
    std::vector<MeasureReport> reports;
    for (const Polygon& region : f.regions) {
      DualMeasureOptions mopts;
      mopts.dual_resolution = f.dual_resolution;
      mopts.dual_lo = f.dual_lo;
      mopts.dual_hi = f.dual_hi;
      reports.push_back(gma_measure_nonsmooth(f.gf, f.u, region, mopts));
    }
    AlexandrovVerdict bounds = alexandrov_verdict(reports, f.claimed_c, f.claimed_C);
    row.lower_pass = bounds.lower_pass;
    row.upper_pass = bounds.upper_pass;

    // Condition scan (coarse but deterministic).
    ScanOptions sopts;
    sopts.x_res = 3;
    sopts.y_res = 3;
    sopts.z_res = 2;
    sopts.random_pairs = 8;
    sopts.k_tuples = 16;
    sopts.seed = seed;
    ConditionReport cond = scan_conditions(f.gf, sopts);
    row.a3w_pass = cond.a3w_pass();
    row.a4w_pass = cond.a4w_pass();

    // Domain convexity with respect to the sampled contact images.
    std::vector<Vec> ys;
    std::vector<double> zs;
    sample_contacts(f.gf, f.u, ys, zs);
    if (ys.empty()) {
      row.domain_gconvex_pass = false;
    } else {
      GConvexityOptions gopts;
      gopts.boundary_points = 8;
      gopts.segment_resolution = 17;
      row.domain_gconvex_pass = is_g_convex_set(f.gf, f.domain_region, ys, zs, gopts).pass;
    }

    // Probe.
    try {
      ProbeReport probe = strict_convexity_probe(f.gf, f.u, f.probe_y0, f.probe_z0,
                                                 f.probe_x_m1, f.probe_x_1, f.probe_opts);
      row.probe_verdict = probe.verdict;
      row.H = probe.H;
      row.implied_H_lower = probe.implied_H_lower;
    } catch (const Error&) {
      row.probe_verdict = ProbeVerdict::Inconclusive;
    }

    // Differentiability check and the image-coverage hypothesis.
    C1Options copts;
    copts.dual_resolution = f.dual_resolution;
    copts.dual_lo = f.dual_lo;
    copts.dual_hi = f.dual_hi;
    C1Report c1 = c1_check(f.gf, f.u, copts);
    row.not_c1 = c1.not_c1;
    row.bvp2_pass = c1.image_coverage >= 0.9;

    // Target convexity under the dual generating function, sampled over
    // (x, u(x)) pairs.
    {
      auto dual = dual_function_object(f.gf);
      std::vector<Vec> xs;
      std::vector<double> us;
      for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b) {
          int i = a * (f.u.n0() - 1) / 3;
          int j = b * (f.u.n1() - 1) / 3;
          xs.push_back(f.u.node_point(i, j));
          us.push_back(f.u.node(i, j));
        }
      Polygon target;
      Vec span = f.dual_hi - f.dual_lo;
      target = Polygon::rectangle(f.dual_lo[0] + 0.02 * span[0], f.dual_lo[1] + 0.02 * span[1],
                                  f.dual_hi[0] - 0.02 * span[0], f.dual_hi[1] - 0.02 * span[1]);
      GConvexityOptions gopts;
      gopts.boundary_points = 6;
      gopts.segment_resolution = 17;
      try {
        row.target_gstar_convex = is_g_convex_set(dual, target, xs, us, gopts).pass;
      } catch (const Error&) {
        row.target_gstar_convex = false;
      }
    }

    // Implication table.
    if (!row.lower_pass) row.failed_hypotheses.push_back("measure-lower-bound");
    if (!row.upper_pass) row.failed_hypotheses.push_back("measure-upper-bound");
    if (!row.a3w_pass) row.failed_hypotheses.push_back("A3w");
    if (!row.a4w_pass) row.failed_hypotheses.push_back("A4w");
    if (!row.domain_gconvex_pass) row.failed_hypotheses.push_back("domain-g-convexity");
    if (!row.bvp2_pass) row.failed_hypotheses.push_back("second-boundary-condition");
    if (!row.target_gstar_convex) row.failed_hypotheses.push_back("target-dual-convexity");

    bool theorem_hyps =
        row.lower_pass && row.a3w_pass && row.a4w_pass && row.domain_gconvex_pass;
    row.theorem_violation = theorem_hyps && row.probe_verdict != ProbeVerdict::Strict;

    bool corollary_hyps = row.upper_pass && row.a3w_pass && row.a4w_pass && row.bvp2_pass &&
                          row.target_gstar_convex;
    row.corollary_violation = corollary_hyps && row.not_c1;

    if (row.theorem_violation || row.corollary_violation) ++summary.violations;
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

}  // namespace gje
