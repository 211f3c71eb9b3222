#include "gje/fd.hpp"

#include <cmath>
#include <limits>

namespace gje {

double fd_step(int total_order, double width) {
  const double eps = std::numeric_limits<double>::epsilon();
  return std::pow(eps, 1.0 / (total_order + 2)) * width;
}

double nested_central(const FlatFn& f, const Vec& v, const VecI& multi, const Vec& steps) {
  int axis = -1;
  for (int a = 0; a < multi.size(); ++a) {
    if (multi[a] > 0) {
      axis = a;
      break;
    }
  }
  if (axis < 0) return f(v);
  VecI reduced = multi;
  reduced[axis] -= 1;
  Vec vp = v, vm = v;
  vp[axis] += steps[axis];
  vm[axis] -= steps[axis];
  return (nested_central(f, vp, reduced, steps) - nested_central(f, vm, reduced, steps)) /
         (2.0 * steps[axis]);
}

double fd_partial_flat(const FlatFn& f, const Vec& v, const VecI& multi,
                       const Vec& base_steps) {
  if (multi.sum() == 0) return f(v);
  double coarse = nested_central(f, v, multi, Vec(4.0 * base_steps));
  double fine = nested_central(f, v, multi, Vec(2.0 * base_steps));
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace gje
