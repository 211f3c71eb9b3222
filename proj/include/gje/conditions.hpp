#pragma once

#include <optional>
#include <vector>

#include "gje/genfun.hpp"

namespace gje {

/// The fourth-order data D_{p_k p_l} A_ij at a point: tensor[k][l] is the
/// n x n matrix in (i,j).
using APTensor = std::vector<std::vector<Mat>>;

/// Nested central differences of coeff_A in p, step eps^(1/4) (1 + |p|);
/// the second derivative of an already FD-sensitive quantity needs the
/// conservative step. Solves are warm-started from the center contact.
APTensor dp2_A(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
               std::optional<FiberPoint> seed = {});

/// Central difference D_u A, step eps^(1/3) (1 + |u|).
Mat du_A(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
         std::optional<FiberPoint> seed = {});

/// The A3w quadratic form on an orthogonal pair: eta is projected off xi and
/// both are normalized before contracting D_p^2 A.
double a3w_form(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                const Vec& xi, const Vec& eta);

/// The raw contraction without projection or normalization (the left side of
/// the relaxed inequality).
double a3w_form_raw(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                    const Vec& xi, const Vec& eta);

/// Returns (lhs, rhs) of the relaxed inequality
/// lhs = D_p^2 A contraction, rhs = -K |xi| |eta| |xi . eta|.
std::pair<double, double> a3w_relaxed_check(const GeneratingFunction& gf, const Vec& x, double u,
                                            const Vec& p, const Vec& xi, const Vec& eta,
                                            double K);

/// D_u A contracted with xi (x) xi: the A4w monotonicity form.
double a4w_form(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                const Vec& xi);

struct ConditionWitness {
  Vec x;
  double u = 0.0;
  Vec p;
  Vec xi, eta;
  double value = 0.0;
};

struct ConditionReport {
  double worst_a3w = 0.0;
  double worst_a4w = 0.0;
  double k_est = 0.0;  // estimate of the relaxed-inequality constant K_a3
  ConditionWitness a3w_witness;
  ConditionWitness a4w_witness;
  long points = 0;
  long skipped = 0;
  int direction_pairs = 0;
  uint64_t seed = 0;
  double pass_tolerance = 1e-6;
  bool a3w_pass() const { return worst_a3w >= -pass_tolerance; }
  bool a4w_pass() const { return worst_a4w >= -pass_tolerance; }
};

struct ScanOptions {
  int x_res = 4;   // per x-axis
  int y_res = 4;   // per y-axis
  int z_res = 4;
  int random_pairs = 16;  // orthogonal unit pairs per point
  int k_tuples = 64;      // random 4-tuples per point for K_est
  uint64_t seed = 20240601;
  double pass_tolerance = 1e-6;
};

/// Scan over Gamma samples mapped to (x, u, p) = (x, g, g_x); infeasible
/// points are skipped and counted.
ConditionReport scan_conditions(const GeneratingFunction& gf, const ScanOptions& opts = {});

}  // namespace gje
