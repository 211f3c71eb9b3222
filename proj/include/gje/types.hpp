#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace gje {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecI = Eigen::VectorXi;

/// Base class for all solver/domain failures raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton or root-finding iteration did not reach tolerance.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// An iterate or evaluation point left the generating-function domain.
class LeftDomain : public Error {
 public:
  using Error::Error;
};

/// Requested value lies outside the achievable range (e.g. u outside g(x,y,I)).
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// A finite-difference stencil would sample outside the domain.
class StencilError : public Error {
 public:
  using Error::Error;
};

/// A precondition verified at runtime does not hold for the given data.
class HypothesisFails : public Error {
 public:
  using Error::Error;
};

/// Derivative request: per-axis orders in x and y plus a z order.
/// Total order is capped at 4 (the smoothness the library assumes).
struct PartialSpec {
  VecI x;  // size n, order per x-axis
  VecI y;  // size n, order per y-axis
  int z = 0;

  explicit PartialSpec(int n) : x(VecI::Zero(n)), y(VecI::Zero(n)), z(0) {}

  PartialSpec& dx(int i, int k = 1) {
    x[i] += k;
    return *this;
  }
  PartialSpec& dy(int j, int k = 1) {
    y[j] += k;
    return *this;
  }
  PartialSpec& dz(int k = 1) {
    z += k;
    return *this;
  }

  int total() const { return x.sum() + y.sum() + z; }
  int x_total() const { return x.sum(); }
  int y_total() const { return y.sum(); }
};

namespace tol {
// Residual tolerance for the (n+1)-dimensional contact-state Newton solves.
inline constexpr double newton = 1e-10;
inline constexpr int newton_max_iter = 50;
inline constexpr int newton_max_damping = 20;
// 1D root-finding tolerance in dual_g.
inline constexpr double dual_root = 1e-12;
// Floor below which |det E| is treated as singular.
inline constexpr double det_e_floor = 1e-8;
// Tie tolerance for argmax/active-support sets: abs + rel * |value|.
inline constexpr double tie_abs = 1e-9;
inline constexpr double tie_rel = 1e-6;
}  // namespace tol

inline double tie_tolerance(double value) {
  return tol::tie_abs + tol::tie_rel * std::abs(value);
}

/// Shared options for the damped Newton solves (contact states, segments).
struct NewtonOptions {
  double tolerance = tol::newton;
  int max_iterations = tol::newton_max_iter;
  int max_damping = tol::newton_max_damping;
  bool polish = true;  // one extra full step after reaching tolerance
};

}  // namespace gje
