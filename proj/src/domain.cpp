#include "gje/domain.hpp"

namespace gje {

DomainBox DomainBox::cube(int n, double x_a, double x_b, double y_a, double y_b,
                          double z_a, double z_b) {
  DomainBox box;
  box.x_lo = Vec::Constant(n, x_a);
  box.x_hi = Vec::Constant(n, x_b);
  box.y_lo = Vec::Constant(n, y_a);
  box.y_hi = Vec::Constant(n, y_b);
  box.z_lo = [z_a](const Vec&, const Vec&) { return z_a; };
  box.z_hi = [z_b](const Vec&, const Vec&) { return z_b; };
  return box;
}

bool DomainBox::contains_x(const Vec& x, double margin) const {
  for (int i = 0; i < dim(); ++i)
    if (x[i] < x_lo[i] + margin || x[i] > x_hi[i] - margin) return false;
  return true;
}

bool DomainBox::contains_y(const Vec& y, double margin) const {
  for (int i = 0; i < dim(); ++i)
    if (y[i] < y_lo[i] + margin || y[i] > y_hi[i] - margin) return false;
  return true;
}

std::pair<double, double> DomainBox::z_interval(const Vec& x, const Vec& y) const {
  return {z_lo(x, y), z_hi(x, y)};
}

bool DomainBox::contains(const Vec& x, const Vec& y, double z, double margin) const {
  if (!contains_x(x, margin) || !contains_y(y, margin)) return false;
  auto [a, b] = z_interval(x, y);
  return z > a + margin && z < b - margin;
}

double DomainBox::z_center(const Vec& x, const Vec& y) const {
  auto [a, b] = z_interval(x, y);
  return 0.5 * (a + b);
}

}  // namespace gje
