#include "gje/height.hpp"

#include <cmath>

#include "gje/conditions.hpp"
#include "gje/mate.hpp"

namespace gje {

Vec fd_first_uniform(const Vec& f, double step) {
  const int m = static_cast<int>(f.size());
  if (m < 5) throw Error("fd_first_uniform: need at least 5 samples");
  Vec d(m);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * step);
  d[1] = (f[2] - f[0]) / (2.0 * step);
  for (int k = 2; k + 2 < m; ++k)
    d[k] = (-f[k + 2] + 8.0 * f[k + 1] - 8.0 * f[k - 1] + f[k - 2]) / (12.0 * step);
  d[m - 2] = (f[m - 1] - f[m - 3]) / (2.0 * step);
  d[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (2.0 * step);
  return d;
}

Vec fd_second_uniform(const Vec& f, double step) {
  const int m = static_cast<int>(f.size());
  if (m < 5) throw Error("fd_second_uniform: need at least 5 samples");
  const double s2 = step * step;
  Vec d(m);
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / s2;
  d[1] = (f[2] - 2.0 * f[1] + f[0]) / s2;
  for (int k = 2; k + 2 < m; ++k)
    d[k] = (-f[k + 2] + 16.0 * f[k + 1] - 30.0 * f[k] + 16.0 * f[k - 1] - f[k - 2]) /
           (12.0 * s2);
  d[m - 2] = (f[m - 1] - 2.0 * f[m - 2] + f[m - 3]) / s2;
  d[m - 1] = (2.0 * f[m - 1] - 5.0 * f[m - 2] + 4.0 * f[m - 3] - f[m - 4]) / s2;
  return d;
}

LemmaRhsBreakdown lemma_rhs(const GeneratingFunction& gf, const ContactState& contact,
                            const Vec& y0, double z0, const Vec& xdot, double hprime,
                            double hvalue, const Mat& hess_u, double K) {
  LemmaRhsBreakdown out;
  const Vec& x = contact.x;

  Mat gxx_contact = gf.hess_xx(x, contact.y, contact.z);
  out.term_d2u = xdot.dot((hess_u - gxx_contact) * xdot);

  const double u0 = gf.eval(x, y0, z0);
  const Vec p0 = gf.grad_x(x, y0, z0);
  const double u1 = contact.u;
  const Vec p1 = contact.p;
  const Vec dp = p1 - p0;

  // D_p^2 A at (x, u0, p_t), contracted with xdot (x) xdot and dp (x) dp.
  // The second-order Taylor remainder carries a factor 1/2.
  auto dpa_at = [&](double s) {
    Vec ps = Vec(p0 + s * dp);
    APTensor t = dp2_A(gf, x, u0, ps);
    double acc = 0.0;
    for (int k = 0; k < gf.dim(); ++k)
      for (int l = 0; l < gf.dim(); ++l) acc += dp[k] * dp[l] * xdot.dot(t[k][l] * xdot);
    return 0.5 * acc;
  };
  // A_u at (x, u_tau, p1), contracted with xdot (x) xdot, times h.
  auto au_at = [&](double s) {
    double us = u0 + s * (u1 - u0);
    Mat d = du_A(gf, x, us, p1);
    return xdot.dot(d * xdot) * hvalue;
  };

  double dpa0 = dpa_at(0.0), dpa_mid = dpa_at(0.5), dpa1 = dpa_at(1.0);
  double au0 = au_at(0.0), au_mid = au_at(0.5), au1 = au_at(1.0);
  out.term_dpa_mid = dpa_mid;
  out.term_dpa_min = std::min({dpa0, dpa_mid, dpa1});
  out.term_au_mid = au_mid;
  out.term_au_min = std::min({au0, au_mid, au1});
  out.term_k = -K * std::abs(hprime);

  out.total_canonical = out.term_d2u + out.term_dpa_mid + out.term_au_mid + out.term_k;
  out.total_conservative = out.term_d2u + out.term_dpa_min + out.term_au_min + out.term_k;
  return out;
}

HeightTrace height_trace(const GeneratingFunction& gf, const GridPotential& u,
                         const GSegment& seg, double sigma) {
  HeightTrace trace;
  trace.y0 = seg.y0;
  trace.z0 = seg.z0;
  trace.sigma = sigma;
  trace.theta_step = seg.theta_step();
  const int m = static_cast<int>(seg.samples.size());
  trace.samples.resize(m);

  // K of the lemma: the explicit coefficient of h' in the velocity identity,
  // two symmetric terms, maximized over the segment. Evaluated at
  // (x_theta, y0, z0) as the lemma prescribes.
  const Vec q = seg.q_rate();
  for (const auto& s : seg.samples) {
    Mat e = assemble_E(gf, s.x, seg.y0, seg.z0);
    Vec einv_t_q = e.transpose().fullPivLu().solve(q);
    Vec gxz = gf.cross_xz(s.x, seg.y0, seg.z0);
    trace.K_lemma = std::max(trace.K_lemma, 2.0 * std::abs(gxz.dot(einv_t_q)));
  }

  Vec h(m);
  std::vector<Vec> grads(m);
  std::vector<Mat> hessians(m);
  for (int k = 0; k < m; ++k) {
    const Vec& x = seg.samples[k].x;
    double uval;
    Vec du;
    Mat d2u;
    u.eval_all(x, &uval, &du, &d2u);
    h[k] = uval - gf.eval(x, seg.y0, seg.z0) - sigma;
    grads[k] = du;
    hessians[k] = d2u;
  }
  Vec hp = fd_first_uniform(h, trace.theta_step);
  Vec hpp = fd_second_uniform(h, trace.theta_step);

  std::optional<FiberPoint> warm;
  for (int k = 0; k < m; ++k) {
    HeightSample& hs = trace.samples[k];
    const SegmentSample& ss = seg.samples[k];
    hs.theta = ss.theta;
    hs.x = ss.x;
    hs.h = h[k];
    hs.h_prime = hp[k];
    hs.h_second = hpp[k];
    double uval = h[k] + gf.eval(ss.x, seg.y0, seg.z0) + sigma;
    try {
      ContactState contact = solve_YZ(gf, ss.x, uval, grads[k], warm);
      warm = FiberPoint{ss.x, contact.y, contact.z};
      hs.rhs = lemma_rhs(gf, contact, seg.y0, seg.z0, ss.xdot, hs.h_prime, hs.h, hessians[k],
                         trace.K_lemma);
      hs.contact_ok = true;
    } catch (const Error&) {
      hs.contact_ok = false;
      ++trace.contact_failures;
    }
  }
  return trace;
}

DiffsegBounds check_diffseg_bounds(const Vec& h_samples, double a, double b, double K, double t,
                                   double hypothesis_tol) {
  const int m = static_cast<int>(h_samples.size());
  if (m < 7) throw Error("check_diffseg_bounds: need at least 7 samples");
  if (!(t > a && t < b)) throw Error("check_diffseg_bounds: t must be interior");
  const double step = (b - a) / (m - 1);

  Vec hp = fd_first_uniform(h_samples, step);
  Vec hpp = fd_second_uniform(h_samples, step);

  // Hypothesis h'' >= -K|h'| at interior samples.
  for (int k = 2; k + 2 < m; ++k) {
    if (hpp[k] < -K * std::abs(hp[k]) - hypothesis_tol)
      throw HypothesisFails("check_diffseg_bounds: h'' >= -K|h'| fails at a sample");
  }

  int kt = static_cast<int>(std::llround((t - a) / step));
  kt = std::max(2, std::min(m - 3, kt));

  double sup_left = 0.0, sup_right = 0.0;
  for (int k = 0; k <= kt; ++k) sup_left = std::max(sup_left, std::abs(h_samples[k]));
  for (int k = kt; k < m; ++k) sup_right = std::max(sup_right, std::abs(h_samples[k]));

  const double tt = a + kt * step;
  auto decay_integral = [K](double len) {
    // integral_0^len e^{-K s} ds, stable for K -> 0.
    if (std::abs(K) * len < 1e-8) return len;
    return (1.0 - std::exp(-K * len)) / K;
  };
  DiffsegBounds out;
  out.c1 = 2.0 / decay_integral(b - tt);
  out.c0 = 2.0 / decay_integral(tt - a);
  out.value = hp[kt];
  out.upper = out.c1 * sup_right;
  out.lower = -out.c0 * sup_left;
  return out;
}

}  // namespace gje
