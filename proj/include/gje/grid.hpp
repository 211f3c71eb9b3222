#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "gje/types.hpp"

namespace gje {

/// Second derivatives of the uniform not-a-knot cubic spline through f.
/// Not-a-knot reproduces cubic polynomials exactly, and the interpolant is
/// C^2, which the height traces need along curved segments.
Vec spline_second_derivs(const Eigen::Ref<const Vec>& f, double h);

/// Evaluate the spline (deriv = 0, 1, 2) given precomputed second derivatives.
double spline_eval(const Eigen::Ref<const Vec>& f, const Eigen::Ref<const Vec>& m, double t0,
                   double h, double t, int deriv);

/// A scalar potential sampled on a uniform rectangular 2D grid, with bicubic
/// spline interpolation for values, gradients, and Hessians.
class GridPotential {
 public:
  GridPotential() = default;
  GridPotential(Vec axis0, Vec axis1, Mat values);

  static Vec linspace(double a, double b, int count);
  static GridPotential from_function(const Vec& axis0, const Vec& axis1,
                                     const std::function<double(const Vec&)>& fn);

  int n0() const { return static_cast<int>(axis0_.size()); }
  int n1() const { return static_cast<int>(axis1_.size()); }
  const Vec& axis0() const { return axis0_; }
  const Vec& axis1() const { return axis1_; }
  const Mat& values() const { return values_; }
  double node(int i, int j) const { return values_(i, j); }
  Vec node_point(int i, int j) const;
  double step0() const { return h0_; }
  double step1() const { return h1_; }

  bool in_bounds(const Vec& x, double margin = 0.0) const;
  /// Distance from x to the grid boundary (negative outside).
  double boundary_distance(const Vec& x) const;

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;
  /// One-pass evaluation; null outputs are skipped.
  void eval_all(const Vec& x, double* u, Vec* grad, Mat* hess) const;

  /// Central-difference Hessian at an interior node.
  Mat fd_hessian_at_node(int i, int j) const;

  GridPotential add_constant(double c) const;

 private:
  Vec axis0_, axis1_;
  Mat values_;
  double h0_ = 0.0, h1_ = 0.0;
  Mat m0_;  // axis-0 spline second derivatives, per column
};

// Serialization: CSV (two axis header rows then value rows) and JSON
// ({"axes": [[...],[...]], "values": [[...], ...]}).
GridPotential grid_from_csv(std::istream& in);
void grid_to_csv(const GridPotential& g, std::ostream& out);
GridPotential grid_from_json_text(const std::string& text);
std::string grid_to_json_text(const GridPotential& g);
GridPotential grid_load(const std::string& path);  // dispatch on extension
void grid_save(const GridPotential& g, const std::string& path);

}  // namespace gje
