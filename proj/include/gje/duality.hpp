#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gje/genfun.hpp"
#include "gje/grid.hpp"

namespace gje {

/// Solution of g(x,y,z) = u, g_x(x,y,z) = p: the maps Y and Z.
struct ContactState {
  Vec x;
  double u = 0.0;
  Vec p;
  Vec y;
  double z = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Solution of g*(x,y,u) = z, g*_y(x,y,u) = q: the dual maps X and U.
struct DualContactState {
  Vec y;
  double z = 0.0;
  Vec q;
  Vec x;
  double u = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Newton solve for (y,z) given (x,u,p). Default seed: the fiber midpoint.
ContactState solve_YZ(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                      std::optional<FiberPoint> seed = {}, const NewtonOptions& opts = {});

/// Runs solve_YZ from Latin-hypercube seeds over the fiber; returns the
/// distinct solutions found (A1 predicts exactly one).
std::vector<ContactState> solve_YZ_multistart(const GeneratingFunction& gf, const Vec& x,
                                              double u, const Vec& p, int seeds,
                                              uint64_t rng_seed,
                                              const NewtonOptions& opts = {});

/// g*(x,y,u): the unique z with g(x,y,z) = u. Closed form when the family
/// provides one, otherwise bracketed bisection plus Newton polish.
double dual_g(const GeneratingFunction& gf, const Vec& x, const Vec& y, double u);

/// g*_y(x,y,u) = -g_y/g_z evaluated at (x, y, g*(x,y,u)).
Vec dual_g_grad_y(const GeneratingFunction& gf, const Vec& x, const Vec& y, double u);

DualContactState solve_XU(const GeneratingFunction& gf, const Vec& y, double z, const Vec& q,
                          std::optional<Vec> seed_x = {}, const NewtonOptions& opts = {});

/// The dual generating function with roles of (x,u) and (y,z) swapped, as a
/// GeneratingFunction usable by every primal code path (segments, measures).
GeneratingFunction dual_function_object(const GeneratingFunction& gf);

/// Result of a sup-transform over a grid: values on the target grid plus the
/// recorded argmax (contact) sets, node validity, and skip counts.
struct TransformResult {
  Vec axis0, axis1;            // target grid axes
  Mat values;                  // sup values; NaN where invalid
  std::vector<std::vector<std::pair<int, int>>> argmax;  // per node, source-node ties
  std::vector<uint8_t> valid;  // per node
  long skipped_points = 0;     // (source,target) pairs outside the admissible range
  long invalid_nodes = 0;      // target nodes with empty admissible set

  int n0() const { return static_cast<int>(axis0.size()); }
  int n1() const { return static_cast<int>(axis1.size()); }
  std::size_t flat(int i, int j) const { return static_cast<std::size_t>(i) * n1() + j; }
  /// GridPotential view of the values (throws if any node is invalid).
  GridPotential potential() const;
};

/// v(y) = max over grid x of g*(x, y, u(x)); argmax sets approximate X_v(y).
TransformResult g_star_transform(const GeneratingFunction& gf, const GridPotential& u,
                                 const Vec& y_axis0, const Vec& y_axis1);

/// u(x) = max over grid y of g(x, y, v(y)); the inverse transform.
TransformResult g_transform(const GeneratingFunction& gf, const GridPotential& v,
                            const Vec& x_axis0, const Vec& x_axis1);

}  // namespace gje
