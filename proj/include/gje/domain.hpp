#pragma once

#include <functional>
#include <utility>

#include "gje/types.hpp"

namespace gje {

/// The domain Gamma of a generating function: a product of an x-box and a
/// y-box, with a per-(x,y) open z-interval (z_lo(x,y), z_hi(x,y)).
struct DomainBox {
  Vec x_lo, x_hi;
  Vec y_lo, y_hi;
  std::function<double(const Vec&, const Vec&)> z_lo;
  std::function<double(const Vec&, const Vec&)> z_hi;

  static DomainBox cube(int n, double x_a, double x_b, double y_a, double y_b,
                        double z_a, double z_b);

  int dim() const { return static_cast<int>(x_lo.size()); }

  bool contains_x(const Vec& x, double margin = 0.0) const;
  bool contains_y(const Vec& y, double margin = 0.0) const;
  /// Fiber interval I_{x,y}; first < second when nonempty.
  std::pair<double, double> z_interval(const Vec& x, const Vec& y) const;
  bool contains(const Vec& x, const Vec& y, double z, double margin = 0.0) const;

  double x_width(int axis) const { return x_hi[axis] - x_lo[axis]; }
  double y_width(int axis) const { return y_hi[axis] - y_lo[axis]; }

  Vec x_center() const { return 0.5 * (x_lo + x_hi); }
  Vec y_center() const { return 0.5 * (y_lo + y_hi); }
  /// Midpoint of the fiber interval at (x,y).
  double z_center(const Vec& x, const Vec& y) const;
};

}  // namespace gje
