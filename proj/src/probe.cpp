#include "gje/probe.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "gje/mate.hpp"
#include "gje/parallel.hpp"

namespace gje {

const char* to_string(ProbeVerdict v) {
  switch (v) {
    case ProbeVerdict::Strict:
      return "STRICT";
    case ProbeVerdict::Degenerate:
      return "DEGENERATE";
    case ProbeVerdict::Inconclusive:
      return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

double implied_H(double delta, double integral, double C) {
  if (C <= 0.0 || integral <= 0.0) return 0.0;
  return delta / std::expm1(integral / C);
}

namespace {

double simpson(const Eigen::Ref<const Vec>& f, double step) {
  const int m = static_cast<int>(f.size());
  if (m < 3 || m % 2 == 0) throw Error("simpson: need an odd number of nodes >= 3");
  double s = f[0] + f[m - 1];
  for (int k = 1; k + 1 < m; ++k) s += f[k] * (k % 2 == 1 ? 4.0 : 2.0);
  return s * step / 3.0;
}

Vec rotate90(const Vec& t, bool flip) {
  Vec n(2);
  n[0] = -t[1];
  n[1] = t[0];
  return flip ? Vec(-n) : n;
}

struct OffsetScan {
  // Per theta-sample rows for one offset segment.
  std::vector<Vec> x;
  std::vector<Vec> xdot;
  Vec h;            // h_sigma along the segment
  Vec m_nn;         // normal-normal component of D^2u - A
  Vec m_tt;
  Vec det_m;
  Vec trace_m;
  Vec min_eig;
  std::vector<uint8_t> contact_ok;
};

}  // namespace

ProbeReport strict_convexity_probe(const GeneratingFunction& gf, const GridPotential& u,
                                   const Vec& y0, double z0, const Vec& x_m1, const Vec& x_1,
                                   const ProbeOptions& opts) {
  if (gf.dim() != 2) throw Error("strict_convexity_probe: two-dimensional domains only");
  ProbeReport rep;
  rep.y0 = y0;
  rep.z0 = z0;
  rep.x_m1 = x_m1;
  rep.x_1 = x_1;

  // Support hypothesis: u >= g(., y0, z0) on the grid.
  double worst_support_gap = 0.0;
  for (int i = 0; i < u.n0(); ++i)
    for (int j = 0; j < u.n1(); ++j) {
      Vec x = u.node_point(i, j);
      worst_support_gap =
          std::max(worst_support_gap, gf.eval(x, y0, z0) - u.node(i, j));
    }
  if (worst_support_gap > 1e-8) {
    rep.support_ok = false;
    rep.flags.push_back("support hypothesis fails: g(.,y0,z0) exceeds u on the grid");
  }

  const double gap_m1 = u.value(x_m1) - gf.eval(x_m1, y0, z0);
  const double gap_1 = u.value(x_1) - gf.eval(x_1, y0, z0);
  rep.sigma = opts.sigma >= 0.0 ? opts.sigma : std::max({gap_m1, gap_1, 0.0});
  if (gap_m1 > rep.sigma + 1e-9 || gap_1 > rep.sigma + 1e-9)
    rep.flags.push_back("sigma is smaller than an endpoint gap");

  // Base g-segment over [-1, 1].
  SegmentOptions seg_opts;
  seg_opts.resolution = opts.theta_resolution;
  seg_opts.theta_min = -1.0;
  seg_opts.theta_max = 1.0;
  GSegment base;
  try {
    base = g_segment(gf, x_m1, x_1, y0, z0, seg_opts);
  } catch (const Error& e) {
    throw LeftDomain(std::string("probe: base segment failed: ") + e.what());
  }

  double min_h = std::numeric_limits<double>::infinity();
  double max_h = -std::numeric_limits<double>::infinity();
  for (const auto& s : base.samples) {
    if (!u.in_bounds(s.x, -1e-9))
      throw LeftDomain("probe: base segment exits the grid");
    double h = u.value(s.x) - gf.eval(s.x, y0, z0) - rep.sigma;
    min_h = std::min(min_h, h);
    max_h = std::max(max_h, h);
  }
  rep.H = std::max(0.0, -min_h);
  rep.max_principle_ok = max_h <= 1e-8 * (1.0 + std::abs(rep.sigma));
  if (!rep.max_principle_ok)
    rep.flags.push_back("h_sigma exceeds zero between the endpoints");

  // Normal field and the offset span.
  const int i_mhalf = base.index_of(-0.5);
  const int i_half = base.index_of(0.5);
  Vec n_mhalf = rotate90(Vec(base.samples[i_mhalf].xdot.normalized()), opts.flip_normal);
  Vec n_half = rotate90(Vec(base.samples[i_half].xdot.normalized()), opts.flip_normal);

  if (opts.delta > 0.0) {
    rep.delta = opts.delta;
  } else {
    double dist = std::numeric_limits<double>::infinity();
    for (int k = i_mhalf; k <= i_half; ++k)
      dist = std::min(dist, u.boundary_distance(base.samples[k].x));
    rep.delta = 0.5 * dist;
  }
  if (!(rep.delta > 0.0)) throw Error("probe: nonpositive offset span delta");

  // K of the differential inequality along the base segment.
  {
    const Vec q = base.q_rate();
    for (const auto& s : base.samples) {
      Mat e = assemble_E(gf, s.x, y0, z0);
      Vec et_q = e.transpose().fullPivLu().solve(q);
      rep.K_lemma = std::max(rep.K_lemma, 2.0 * std::abs(gf.cross_xz(s.x, y0, z0).dot(et_q)));
    }
  }

  const int ne = opts.epsilon_resolution;
  if (ne < 3 || ne % 2 == 0) throw Error("probe: epsilon resolution must be odd and >= 3");
  const double eps_step = rep.delta / (ne - 1);
  const int off_res = (opts.theta_resolution + 1) / 2;  // matches the base step
  SegmentOptions off_opts;
  off_opts.resolution = off_res;
  off_opts.theta_min = -0.5;
  off_opts.theta_max = 0.5;

  std::vector<OffsetScan> scans(ne);
  std::vector<std::string> scan_errors(ne);

  parallel_for(ne, [&](std::size_t ei) {
    double eps = eps_step * ei;
    OffsetScan& scan = scans[ei];
    try {
      Vec a = Vec(base.samples[i_mhalf].x + eps * n_mhalf);
      Vec b = Vec(base.samples[i_half].x + eps * n_half);
      GSegment off = g_segment(gf, a, b, y0, z0, off_opts);
      const int m = off_res;
      scan.x.resize(m);
      scan.xdot.resize(m);
      scan.h.resize(m);
      scan.m_nn.resize(m);
      scan.m_tt.resize(m);
      scan.det_m.resize(m);
      scan.trace_m.resize(m);
      scan.min_eig.resize(m);
      scan.contact_ok.assign(m, 0);
      std::optional<FiberPoint> warm;
      for (int k = 0; k < m; ++k) {
        const SegmentSample& s = off.samples[k];
        if (!u.in_bounds(s.x, -1e-9)) {
          std::ostringstream msg;
          msg << "offset segment exits the grid at eps=" << eps << " theta=" << s.theta;
          throw LeftDomain(msg.str());
        }
        scan.x[k] = s.x;
        scan.xdot[k] = s.xdot;
        double uval;
        Vec du;
        Mat d2u;
        u.eval_all(s.x, &uval, &du, &d2u);
        scan.h[k] = uval - gf.eval(s.x, y0, z0) - rep.sigma;
        try {
          ContactState contact = solve_YZ(gf, s.x, uval, du, warm);
          warm = FiberPoint{s.x, contact.y, contact.z};
          Mat a_mat = gf.hess_xx(s.x, contact.y, contact.z);
          Mat m_mat = d2u - 0.5 * (a_mat + a_mat.transpose());
          Vec t_hat = Vec(s.xdot.normalized());
          Vec n_hat = rotate90(t_hat, opts.flip_normal);
          scan.m_tt[k] = t_hat.dot(m_mat * t_hat);
          scan.m_nn[k] = n_hat.dot(m_mat * n_hat);
          scan.det_m[k] = m_mat.determinant();
          scan.trace_m[k] = m_mat.trace();
          Eigen::SelfAdjointEigenSolver<Mat> eig(m_mat);
          scan.min_eig[k] = eig.eigenvalues().minCoeff();
          scan.contact_ok[k] = 1;
        } catch (const Error&) {
          scan.contact_ok[k] = 0;
        }
      }
    } catch (const Error& e) {
      scan_errors[ei] = e.what();
    }
  });

  for (int ei = 0; ei < ne; ++ei)
    if (!scan_errors[ei].empty())
      throw LeftDomain("probe: " + scan_errors[ei]);

  // The middle half of the offset parameter range carries the integrals.
  GSegment probe_shape;
  probe_shape.theta_min = -0.5;
  probe_shape.theta_max = 0.5;
  probe_shape.samples.resize(off_res);
  const double theta_step = 1.0 / (off_res - 1);
  int q_lo = (off_res - 1) / 4;      // theta = -0.25
  int q_hi = off_res - 1 - q_lo;     // theta = +0.25
  const int q_count = q_hi - q_lo + 1;
  if (q_count % 2 == 0) throw Error("probe: quarter-range node count must be odd");

  Vec J(ne), S(ne), trace_arr(ne), dineq(ne);
  rep.c_min_det = std::numeric_limits<double>::infinity();
  double max_inv_speed2 = 0.0;
  long in_range_contact_failures = 0;

  for (int ei = 0; ei < ne; ++ei) {
    const OffsetScan& scan = scans[ei];
    const double eps = eps_step * ei;
    Vec hp = fd_first_uniform(scan.h, theta_step);

    Vec j_int(q_count), s_int(q_count), t_int(q_count);
    double local_dineq = 0.0;
    for (int k = 0; k < off_res; ++k) {
      if (!scan.contact_ok[k]) {
        ++rep.contact_failures;
        if (k >= q_lo && k <= q_hi) ++in_range_contact_failures;
        continue;
      }
      double speed2 = scan.xdot[k].squaredNorm();
      max_inv_speed2 = std::max(max_inv_speed2, 1.0 / speed2);
      // 2D cofactor inequality M_tt * M_nn >= det M at elliptic samples.
      if (scan.min_eig[k] >= -opts.ellipticity_tol) {
        double slack = 1e-9 * (1.0 + std::abs(scan.det_m[k]));
        if (scan.m_tt[k] * scan.m_nn[k] < scan.det_m[k] - slack) rep.cofactor_ok = false;
      } else {
        rep.elliptic_ok = false;
      }
      rep.c_min_det = std::min(rep.c_min_det, scan.det_m[k]);
      // Lipschitz transfer to the base segment (same theta grid).
      if (ei > 0) {
        int base_idx = base.index_of(-0.5 + k * theta_step);
        double ratio = (scan.x[k] - base.samples[base_idx].x).norm() / eps;
        rep.lipschitz_transfer = std::max(rep.lipschitz_transfer, ratio);
      }
    }
    for (int k = q_lo; k <= q_hi; ++k) {
      int kk = k - q_lo;
      double speed2 = scan.xdot[k].squaredNorm();
      double m_nn = scan.contact_ok[k] ? scan.m_nn[k] : 0.0;
      double floor = 1e-12;
      if (m_nn < floor) {
        m_nn = floor;
        ++rep.clamped_denominators;
      }
      j_int[kk] = (scan.contact_ok[k] ? scan.m_nn[k] : 0.0) / speed2;
      s_int[kk] = speed2 / m_nn;
      t_int[kk] = scan.contact_ok[k] ? scan.trace_m[k] : 0.0;
      double denom = eps + rep.H;
      if (denom > 1e-14) local_dineq = std::max(local_dineq, std::abs(hp[k]) / denom);
    }
    J[ei] = simpson(j_int, theta_step);
    S[ei] = simpson(s_int, theta_step);
    trace_arr[ei] = simpson(t_int, theta_step);
    dineq[ei] = local_dineq;
    rep.C_dineq = std::max(rep.C_dineq, local_dineq);
  }
  if (in_range_contact_failures > 0)
    rep.flags.push_back("contact failures inside the integration patch");

  rep.integral_I = simpson(J, eps_step);
  rep.trace_integral = simpson(trace_arr, eps_step);
  rep.trace_bound = max_inv_speed2 * rep.trace_integral;

  for (int ei = 0; ei < ne; ++ei) {
    double denom = eps_step * ei + rep.H;
    if (denom > 1e-14) rep.C_S = std::max(rep.C_S, S[ei] / denom);
  }
  // Cauchy-Schwarz on the quarter range (length 1/2): J >= (1/2)^2 / S.
  rep.C_probe = rep.C_S > 0.0 ? 0.25 / rep.C_S : 0.0;
  rep.implied_H_lower = implied_H(rep.delta, rep.integral_I, rep.C_probe);

  if (rep.H > opts.degenerate_threshold) {
    Vec jr(ne);
    for (int ei = 0; ei < ne; ++ei) jr[ei] = rep.C_probe / (eps_step * ei + rep.H);
    rep.jensen_rhs = simpson(jr, eps_step);
  } else {
    rep.jensen_diverges = true;
    rep.flags.push_back(
        "flat contact: the harmonic bound diverges while the measured integral stays finite");
  }

  // Velocity floor and |Du| bound (bookkeeping constants).
  double min_speed = std::numeric_limits<double>::infinity();
  for (const auto& scan : scans)
    for (const auto& v : scan.xdot) min_speed = std::min(min_speed, v.norm());
  for (int i = 0; i < u.n0(); i += 4)
    for (int j = 0; j < u.n1(); j += 4) {
      if (i == 0 || j == 0 || i + 1 >= u.n0() || j + 1 >= u.n1()) continue;
      rep.sup_du = std::max(rep.sup_du, u.gradient(u.node_point(i, j)).norm());
    }

  // Coordinate-change Jacobian bound for the (theta, eps) patch.
  for (int ei = 1; ei + 1 < ne; ++ei) {
    for (int k = q_lo; k <= q_hi; ++k) {
      Vec dxde = Vec((scans[ei + 1].x[k] - scans[ei - 1].x[k]) / (2.0 * eps_step));
      Mat jac(2, 2);
      jac.col(0) = scans[ei].xdot[k];
      jac.col(1) = dxde;
      rep.jacobian_bound = std::max(rep.jacobian_bound, std::abs(jac.determinant()));
    }
  }
  if (rep.lipschitz_transfer > opts.lipschitz_cap)
    rep.flags.push_back("offset-to-base transfer constant exceeds the configured cap");

  // A-term constant on a subsampled set (ledger only).
  double c_other = 0.0;
  {
    std::optional<FiberPoint> warm;
    for (int ei = 0; ei < ne; ei += opts.coarse_stride) {
      const OffsetScan& scan = scans[ei];
      double eps = eps_step * ei;
      Vec hp = fd_first_uniform(scan.h, theta_step);
      for (int k = q_lo; k <= q_hi; k += opts.coarse_stride) {
        if (!scan.contact_ok[k]) continue;
        try {
          double uval;
          Vec du;
          Mat d2u;
          u.eval_all(scan.x[k], &uval, &du, &d2u);
          ContactState contact = solve_YZ(gf, scan.x[k], uval, du, warm);
          warm = FiberPoint{scan.x[k], contact.y, contact.z};
          LemmaRhsBreakdown b = lemma_rhs(gf, contact, y0, z0, scan.xdot[k], hp[k], scan.h[k],
                                          d2u, rep.K_lemma);
          double denom = eps + rep.H;
          if (denom > 1e-14)
            c_other = std::max(c_other, (std::abs(b.term_dpa_mid) + std::abs(b.term_au_mid) +
                                         std::abs(b.term_k)) /
                                            denom);
        } catch (const Error&) {
        }
      }
    }
  }

  // Verdict.
  if (rep.H < opts.degenerate_threshold) {
    rep.verdict = ProbeVerdict::Degenerate;
  } else if (!rep.elliptic_ok || !rep.support_ok || !rep.max_principle_ok ||
             in_range_contact_failures > 0) {
    rep.verdict = ProbeVerdict::Inconclusive;
  } else if (rep.implied_H_lower > 0.0 &&
             rep.H >= rep.implied_H_lower * (1.0 - opts.strict_slack)) {
    rep.verdict = ProbeVerdict::Strict;
  } else {
    rep.verdict = ProbeVerdict::Inconclusive;
  }

  auto put = [&](const std::string& name, double value, const std::string& why) {
    rep.constants.push_back({name, value, why});
  };
  put("sigma", rep.sigma, "max of the two endpoint gaps (or supplied)");
  put("H", rep.H, "largest drop of h_sigma below zero along the base segment");
  put("delta", rep.delta, "offset span: half the distance from the middle half to the grid edge");
  put("K_lemma", rep.K_lemma,
      "max over the segment of 2|g_xz . E^{-T} q|, the h' coefficient of the identity");
  put("c_min_det", rep.c_min_det,
      "min det(D^2u - A) over probe samples; the measure lower bound as seen by the probe");
  put("C_dineq", rep.C_dineq, "max |dh/dtheta| / (eps + H) over the quarter range");
  put("C_S", rep.C_S, "max over eps of the inverse-form integral divided by (eps + H)");
  put("C_probe", rep.C_probe, "0.25 / C_S from the Cauchy-Schwarz step on the quarter range");
  put("C_other", c_other,
      "subsampled max of (|A-term| + |K-term|) / (eps + H); the terms absorbed into the "
      "derivative bound");
  put("integral_I", rep.integral_I,
      "measured double integral of |xdot|^-2 (D^2u - A)_nn over the patch");
  put("trace_integral", rep.trace_integral, "double integral of trace(D^2u - A)");
  put("trace_bound", rep.trace_bound, "max |xdot|^-2 times the trace integral");
  put("jacobian_bound", rep.jacobian_bound, "max |det d x/d(theta,eps)| over the patch");
  put("lipschitz_transfer", rep.lipschitz_transfer, "max |x^eps - x| / eps against the base");
  put("min_speed", min_speed, "velocity floor along the offsets (det E away from zero)");
  put("sup_du", rep.sup_du, "max |Du| over subsampled grid nodes");
  put("implied_H_lower", rep.implied_H_lower,
      "delta / (exp(I / C_probe) - 1): the inverted harmonic bound");
  return rep;
}

C1Report c1_check(const GeneratingFunction& gf, const GridPotential& u, const C1Options& opts) {
  C1Report rep;
  Vec lo = opts.dual_lo.size() == 2 ? opts.dual_lo : gf.domain().y_lo;
  Vec hi = opts.dual_hi.size() == 2 ? opts.dual_hi : gf.domain().y_hi;
  const int nodes = opts.dual_resolution + 1;  // inclusive grid: cells + 1
  Vec ax0 = GridPotential::linspace(lo[0], hi[0], nodes);
  Vec ax1 = GridPotential::linspace(lo[1], hi[1], nodes);

  TransformResult tr = g_star_transform(gf, u, ax0, ax1);
  rep.invalid_nodes = tr.invalid_nodes;

  struct Extent {
    double lo0 = std::numeric_limits<double>::infinity();
    double hi0 = -std::numeric_limits<double>::infinity();
    double lo1 = std::numeric_limits<double>::infinity();
    double hi1 = -std::numeric_limits<double>::infinity();
    long count = 0;
  };
  const int n0s = u.n0(), n1s = u.n1();
  std::vector<Extent> extents(static_cast<std::size_t>(n0s) * n1s);

  long covered = 0;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      const auto& ties = tr.argmax[tr.flat(i, j)];
      bool interior_contact = false;
      for (const auto& [a, b] : ties) {
        Extent& e = extents[static_cast<std::size_t>(a) * n1s + b];
        e.lo0 = std::min(e.lo0, ax0[i]);
        e.hi0 = std::max(e.hi0, ax0[i]);
        e.lo1 = std::min(e.lo1, ax1[j]);
        e.hi1 = std::max(e.hi1, ax1[j]);
        ++e.count;
        if (a > 0 && a + 1 < n0s && b > 0 && b + 1 < n1s) interior_contact = true;
      }
      if (interior_contact) ++covered;
    }
  rep.image_coverage = static_cast<double>(covered) / (static_cast<double>(nodes) * nodes);

  // Witnesses: interior grid points whose dual contact set has extent.
  // Boundary points collect normal-cone artifacts and are excluded.
  for (int a = 1; a + 1 < n0s; ++a)
    for (int b = 1; b + 1 < n1s; ++b) {
      const Extent& e = extents[static_cast<std::size_t>(a) * n1s + b];
      if (e.count == 0) continue;
      double d0 = e.hi0 - e.lo0, d1 = e.hi1 - e.lo1;
      double extent = std::hypot(d0, d1);
      rep.max_extent = std::max(rep.max_extent, extent);
      if (extent > opts.separation) {
        C1Witness w;
        w.x = u.node_point(a, b);
        w.extent = extent;
        w.count = e.count;
        w.y_lo = Vec(2);
        w.y_hi = Vec(2);
        w.y_lo[0] = e.lo0;
        w.y_lo[1] = e.lo1;
        w.y_hi[0] = e.hi0;
        w.y_hi[1] = e.hi1;
        rep.witnesses.push_back(std::move(w));
      }
    }
  rep.not_c1 = !rep.witnesses.empty();
  return rep;
}

}  // namespace gje
