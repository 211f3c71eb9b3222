#pragma once

#include <string>
#include <vector>

#include "gje/duality.hpp"
#include "gje/genfun.hpp"
#include "gje/grid.hpp"
#include "gje/polygon.hpp"

namespace gje {

/// u(x) = max_i g(x, y_i, z_i): a finite family of g-supports.
struct SemiDiscretePotential {
  std::vector<Vec> ys;
  std::vector<double> zs;

  double eval(const GeneratingFunction& gf, const Vec& x) const;
  /// Indices of supports within tie tolerance of the max at x.
  std::vector<int> active(const GeneratingFunction& gf, const Vec& x) const;
  GridPotential sample(const GeneratingFunction& gf, const Vec& axis0, const Vec& axis1) const;
};

enum class MeasureMethod { JacobianQuadrature, DualBoxCounting };

struct MeasureReport {
  double region_area = 0.0;
  double mu = 0.0;
  MeasureMethod method = MeasureMethod::JacobianQuadrature;
  // Smooth path diagnostics.
  long cells_used = 0;
  long negative_cells = 0;  // det DY < 0, clipped to zero
  long solver_failures = 0;
  bool g_convex_sampled = true;  // D^2u - A >= 0 held at the used cells
  // Dual box-counting diagnostics.
  long marked_cells = 0;
  double mu_coarse = 0.0;  // the same count at half resolution
  long marked_cells_coarse = 0;
  long inadmissible_pairs = 0;
  long invalid_dual_nodes = 0;
  std::vector<std::string> notes;
};

struct SmoothMeasureOptions {
  double ellipticity_tol = 1e-8;
};

/// mu(E) by midpoint quadrature of det DY over the grid cells clipped to E.
MeasureReport gma_measure_smooth(const GeneratingFunction& gf, const GridPotential& u,
                                 const Polygon& region, const SmoothMeasureOptions& opts = {});

struct DualMeasureOptions {
  int dual_resolution = 128;  // cells per axis on the dual grid
  Vec dual_lo, dual_hi;       // defaults to the y-box of gf
  bool convergence_pair = true;  // also count at half resolution
};

/// mu(E) by dual box counting: a dual cell is marked when any recorded
/// argmax (contact) point of the g*-transform falls in E.
MeasureReport gma_measure_nonsmooth(const GeneratingFunction& gf, const GridPotential& u,
                                    const Polygon& region, const DualMeasureOptions& opts = {});
MeasureReport gma_measure_nonsmooth(const GeneratingFunction& gf,
                                    const SemiDiscretePotential& u, const Polygon& region,
                                    const DualMeasureOptions& opts = {},
                                    int sample_resolution = 129);

struct BoundVerdict {
  bool pass = false;
  double ratio = 0.0;   // mu / |E|
  double margin = 0.0;  // signed distance to the bound
};

struct AlexandrovRow {
  MeasureReport report;
  BoundVerdict lower;
  BoundVerdict upper;
};

struct AlexandrovVerdict {
  std::vector<AlexandrovRow> rows;
  bool lower_pass = true;
  bool upper_pass = true;
};

/// PASS/FAIL per bound per precomputed region report, with margins.
AlexandrovVerdict alexandrov_verdict(const std::vector<MeasureReport>& reports, double c,
                                     double C);

}  // namespace gje
