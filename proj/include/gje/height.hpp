#pragma once

#include <vector>

#include "gje/duality.hpp"
#include "gje/grid.hpp"
#include "gje/segments.hpp"

namespace gje {

/// 4th-order central first derivative on a uniform grid (lower-order
/// one-sided stencils at the edges; edge values are excluded from the
/// inequality checks downstream).
Vec fd_first_uniform(const Vec& f, double step);
Vec fd_second_uniform(const Vec& f, double step);

/// The assembled right side of the height differential inequality at one
/// sample. The A-derivative terms are evaluated at the chord midpoint (the
/// canonical choice) and additionally at the chord extremes; the
/// conservative total uses the weakest of the three, so a mean-value point
/// anywhere on the chord cannot produce a false failure.
struct LemmaRhsBreakdown {
  double total_conservative = 0.0;
  double total_canonical = 0.0;
  double term_d2u = 0.0;      // [D^2u - g_xx(contact)] contracted with xdot
  double term_dpa_mid = 0.0;  // D_p^2 A term at the p-chord midpoint
  double term_dpa_min = 0.0;  // min over chord parameters {0, 1/2, 1}
  double term_au_mid = 0.0;   // A_u term at the u-chord midpoint
  double term_au_min = 0.0;
  double term_k = 0.0;        // -K |h'|
};

LemmaRhsBreakdown lemma_rhs(const GeneratingFunction& gf, const ContactState& contact,
                            const Vec& y0, double z0, const Vec& xdot, double hprime,
                            double hvalue, const Mat& hess_u, double K);

struct HeightSample {
  double theta = 0.0;
  Vec x;
  double h = 0.0;
  double h_prime = 0.0;
  double h_second = 0.0;
  bool contact_ok = false;
  LemmaRhsBreakdown rhs;
};

struct HeightTrace {
  Vec y0;
  double z0 = 0.0;
  double sigma = 0.0;
  double K_lemma = 0.0;   // max over the segment of the velocity-coupled
                          // g_{j,z} coefficient (two symmetric terms)
  std::vector<HeightSample> samples;
  long contact_failures = 0;
  double theta_step = 0.0;

  /// Interior samples are those at least two stencil widths from the ends.
  bool interior(int k) const {
    return k >= 2 && k + 2 < static_cast<int>(samples.size());
  }
};

/// Samples h_sigma(theta) = u(x_theta) - g(x_theta,y0,z0) - sigma along the
/// segment, its theta-derivatives, and the assembled lower bound.
HeightTrace height_trace(const GeneratingFunction& gf, const GridPotential& u,
                         const GSegment& seg, double sigma);

struct DiffsegBounds {
  double lower = 0.0;  // -C0 sup_{[a,t]} |h|
  double value = 0.0;  // h'(t)
  double upper = 0.0;  // C1 sup_{[t,b]} |h|
  double c0 = 0.0, c1 = 0.0;
  bool contains() const { return lower <= value && value <= upper; }
};

/// Derivative sandwich for sampled h on [a,b] under h'' >= -K|h'|.
/// C1 = 2 / integral_t^b e^{-K(s-t)} ds and symmetrically for C0, the
/// integrated form of the exponential derivative inequality.
/// Raises HypothesisFails when h'' >= -K|h'| does not hold at the samples.
DiffsegBounds check_diffseg_bounds(const Vec& h_samples, double a, double b, double K, double t,
                                   double hypothesis_tol = 1e-7);

}  // namespace gje
