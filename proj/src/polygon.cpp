#include "gje/polygon.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace gje {

namespace {

Vec make_point(double a, double b) {
  Vec p(2);
  p[0] = a;
  p[1] = b;
  return p;
}

double signed_area(const std::vector<Vec>& vs) {
  double s = 0.0;
  const std::size_t n = vs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& a = vs[i];
    const Vec& b = vs[(i + 1) % n];
    s += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * s;
}

// Clip a polygon against the half-plane keep(p) >= 0 with boundary value
// given by side(p); standard Sutherland-Hodgman step.
std::vector<Vec> clip_half_plane(const std::vector<Vec>& poly,
                                 const std::function<double(const Vec&)>& side) {
  std::vector<Vec> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& cur = poly[i];
    const Vec& nxt = poly[(i + 1) % n];
    double sc = side(cur), sn = side(nxt);
    if (sc >= 0.0) out.push_back(cur);
    if ((sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0)) {
      double t = sc / (sc - sn);
      out.push_back(Vec(cur + t * (nxt - cur)));
    }
  }
  return out;
}

}  // namespace

Polygon Polygon::rectangle(double x0, double y0, double x1, double y1) {
  Polygon p;
  p.vertices = {make_point(x0, y0), make_point(x1, y0), make_point(x1, y1),
                make_point(x0, y1)};
  return p;
}

double Polygon::area() const { return std::abs(signed_area(vertices)); }

bool Polygon::contains(const Vec& p) const {
  // Ray casting with an on-edge check.
  const std::size_t n = vertices.size();
  bool inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& a = vertices[i];
    const Vec& b = vertices[(i + 1) % n];
    // On-segment test.
    double cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    if (std::abs(cross) < 1e-12 && p[0] >= std::min(a[0], b[0]) - 1e-12 &&
        p[0] <= std::max(a[0], b[0]) + 1e-12 && p[1] >= std::min(a[1], b[1]) - 1e-12 &&
        p[1] <= std::max(a[1], b[1]) + 1e-12)
      return true;
    if ((a[1] > p[1]) != (b[1] > p[1])) {
      double t = (p[1] - a[1]) / (b[1] - a[1]);
      if (a[0] + t * (b[0] - a[0]) > p[0]) inside = !inside;
    }
  }
  return inside;
}

std::pair<Vec, Vec> Polygon::bounding_box() const {
  Vec lo = make_point(std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (const Vec& v : vertices) {
    lo[0] = std::min(lo[0], v[0]);
    lo[1] = std::min(lo[1], v[1]);
    hi[0] = std::max(hi[0], v[0]);
    hi[1] = std::max(hi[1], v[1]);
  }
  return {lo, hi};
}

double Polygon::clipped_area(double x0, double y0, double x1, double y1) const {
  std::vector<Vec> poly = vertices;
  poly = clip_half_plane(poly, [x0](const Vec& p) { return p[0] - x0; });
  if (poly.empty()) return 0.0;
  poly = clip_half_plane(poly, [x1](const Vec& p) { return x1 - p[0]; });
  if (poly.empty()) return 0.0;
  poly = clip_half_plane(poly, [y0](const Vec& p) { return p[1] - y0; });
  if (poly.empty()) return 0.0;
  poly = clip_half_plane(poly, [y1](const Vec& p) { return y1 - p[1]; });
  if (poly.size() < 3) return 0.0;
  return std::abs(signed_area(poly));
}

}  // namespace gje
