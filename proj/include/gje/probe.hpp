#pragma once

#include <string>
#include <vector>

#include "gje/duality.hpp"
#include "gje/genfun.hpp"
#include "gje/grid.hpp"
#include "gje/height.hpp"
#include "gje/measure.hpp"
#include "gje/polygon.hpp"
#include "gje/segments.hpp"

namespace gje {

struct LedgerEntry {
  std::string name;
  double value = 0.0;
  std::string provenance;
};

enum class ProbeVerdict { Strict, Degenerate, Inconclusive };

const char* to_string(ProbeVerdict v);

struct ProbeOptions {
  double sigma = -1.0;  // < 0: max of the two endpoint gaps (tight choice)
  double delta = -1.0;  // < 0: half the distance from the middle half of the
                        // segment to the grid boundary
  int theta_resolution = 129;   // base segment samples over [-1, 1]
  int epsilon_resolution = 33;  // quadrature nodes over [0, delta]
  bool flip_normal = false;
  double strict_slack = 0.05;
  double degenerate_threshold = 1e-8;
  double ellipticity_tol = 1e-8;
  double lipschitz_cap = 50.0;
  int coarse_stride = 8;  // subsampling for the A-term constant estimate
};

/// The quantitative strict-convexity probe report: measured height gap H,
/// the trace integral, the inverted lower bound on H, and every constant
/// used along the chain with its provenance.
struct ProbeReport {
  Vec y0;
  double z0 = 0.0;
  Vec x_m1, x_1;
  double sigma = 0.0;
  double delta = 0.0;
  double H = 0.0;
  double implied_H_lower = 0.0;
  double integral_I = 0.0;       // measured double integral of |xdot|^-2 M_nn
  double trace_integral = 0.0;   // integral of trace(D^2u - A) over the patch
  double trace_bound = 0.0;      // max |xdot|^-2 times the trace integral
  double jensen_rhs = 0.0;       // quadrature of C_probe/(eps+H); 0 when H = 0
  bool jensen_diverges = false;  // H = 0: the harmonic bound has no finite value
  ProbeVerdict verdict = ProbeVerdict::Inconclusive;

  double c_min_det = 0.0;   // min det(D^2u - A) over probe samples
  double C_dineq = 0.0;     // max |dh/dtheta| / (eps + H)
  double C_S = 0.0;         // max S(eps)/(eps+H), S the inverse-form integral
  double C_probe = 0.0;     // 0.25 / C_S (Cauchy-Schwarz on [-1/4,1/4])
  double K_lemma = 0.0;
  double lipschitz_transfer = 0.0;  // max |x_theta^eps - x_theta| / eps
  double jacobian_bound = 0.0;      // max |det d x / d(theta,eps)|
  double sup_du = 0.0;

  bool cofactor_ok = true;
  bool elliptic_ok = true;
  bool max_principle_ok = true;
  bool support_ok = true;
  long contact_failures = 0;
  long clamped_denominators = 0;

  std::vector<LedgerEntry> constants;
  std::vector<std::string> flags;
};

/// Closed-form inversion of integral_0^delta C/(eps+H) d eps = I for H.
double implied_H(double delta, double integral, double C);

ProbeReport strict_convexity_probe(const GeneratingFunction& gf, const GridPotential& u,
                                   const Vec& y0, double z0, const Vec& x_m1, const Vec& x_1,
                                   const ProbeOptions& opts = {});

struct C1Witness {
  Vec x;
  double extent = 0.0;  // bounding-box diagonal of the contact set in y
  long count = 0;
  Vec y_lo, y_hi;
};

struct C1Options {
  int dual_resolution = 128;
  Vec dual_lo, dual_hi;       // defaults to the y-box
  double separation = 0.25;   // witness threshold on the contact-set extent
};

struct C1Report {
  bool not_c1 = false;
  std::vector<C1Witness> witnesses;
  double max_extent = 0.0;
  long invalid_nodes = 0;
  double image_coverage = 0.0;  // fraction of dual nodes with interior contacts
};

/// Scans the g*-transform's recorded contact sets for points x whose dual
/// contact set has positive extent: such an x carries two separated
/// supports, the differentiability failure witness.
C1Report c1_check(const GeneratingFunction& gf, const GridPotential& u,
                  const C1Options& opts = {});

/// A committed test problem for the consistency suite.
struct Fixture {
  std::string name;
  GeneratingFunction gf;
  GridPotential u;
  double claimed_c = 0.0;
  double claimed_C = 0.0;
  std::vector<Polygon> regions;
  Vec probe_y0;
  double probe_z0 = 0.0;
  Vec probe_x_m1, probe_x_1;
  Polygon domain_region;  // region whose g-convexity is hypothesized
  Vec dual_lo, dual_hi;   // the claimed target box (for 2bvp and c1)
  int dual_resolution = 96;
  ProbeOptions probe_opts;
};

struct SuiteRow {
  std::string fixture;
  bool lower_pass = false;
  bool upper_pass = false;
  bool a3w_pass = false;
  bool a4w_pass = false;
  bool domain_gconvex_pass = false;
  bool bvp2_pass = false;          // Y_u(Omega) covers the target box
  bool target_gstar_convex = false;
  ProbeVerdict probe_verdict = ProbeVerdict::Inconclusive;
  bool not_c1 = false;
  double H = 0.0;
  double implied_H_lower = 0.0;
  bool theorem_violation = false;   // hypotheses hold but probe not STRICT
  bool corollary_violation = false;  // hypotheses hold but NOT_C1 detected
  std::vector<std::string> failed_hypotheses;
};

struct SuiteSummary {
  std::vector<SuiteRow> rows;
  long violations = 0;
  uint64_t seed = 0;
};

SuiteSummary theorem_consistency_suite(const std::vector<Fixture>& fixtures,
                                       uint64_t seed = 20240601);

/// The committed fixture set spanning bilinear, quad-cost, and log-cost.
std::vector<Fixture> builtin_fixture_set();

}  // namespace gje
