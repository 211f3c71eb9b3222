#pragma once

#include <vector>

#include "gje/types.hpp"

namespace gje {

/// Simple (non-self-intersecting) polygon in the plane, vertices in order.
struct Polygon {
  std::vector<Vec> vertices;

  static Polygon rectangle(double x0, double y0, double x1, double y1);

  double area() const;  // absolute area
  bool contains(const Vec& p) const;  // boundary counts as inside
  /// Axis-aligned bounding box: {min, max}.
  std::pair<Vec, Vec> bounding_box() const;
  /// Area of the intersection with an axis-aligned rectangle
  /// (Sutherland-Hodgman clip of this polygon against the rectangle).
  double clipped_area(double x0, double y0, double x1, double y1) const;
};

}  // namespace gje
