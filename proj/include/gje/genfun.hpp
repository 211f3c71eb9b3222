#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gje/domain.hpp"
#include "gje/types.hpp"

namespace gje {

/// A point (x, y, z) in the domain Gamma.
struct FiberPoint {
  Vec x;
  Vec y;
  double z = 0.0;
};

using EvalFn = std::function<double(const Vec&, const Vec&, double)>;
using PartialFn = std::function<double(const Vec&, const Vec&, double, const PartialSpec&)>;
/// Closed-form dual: the z with g(x,y,z) = u, when the family has one.
using DualZFn = std::function<double(const Vec&, const Vec&, double)>;

/// A generating function g(x, y, z) on a box domain, with derivatives up to
/// total order 4 supplied analytically or synthesized by finite differences.
/// Immutable after construction; evaluation is pure and thread-safe.
class GeneratingFunction {
 public:
  GeneratingFunction(int dim, DomainBox domain, EvalFn eval, PartialFn analytic = nullptr,
                     std::string family = "custom", std::vector<double> params = {});

  int dim() const { return dim_; }
  const DomainBox& domain() const { return domain_; }
  const std::string& family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  bool has_analytic_derivatives() const { return static_cast<bool>(analytic_); }

  double operator()(const Vec& x, const Vec& y, double z) const { return eval_(x, y, z); }
  double eval(const Vec& x, const Vec& y, double z) const { return eval_(x, y, z); }

  /// Partial derivative; total order <= 4. FD synthesis raises StencilError
  /// when the stencil would leave Gamma.
  double partial(const Vec& x, const Vec& y, double z, const PartialSpec& spec) const;
  double partial(const FiberPoint& p, const PartialSpec& spec) const {
    return partial(p.x, p.y, p.z, spec);
  }

  Vec grad_x(const Vec& x, const Vec& y, double z) const;
  Vec grad_y(const Vec& x, const Vec& y, double z) const;
  double dz(const Vec& x, const Vec& y, double z) const;
  double dzz(const Vec& x, const Vec& y, double z) const;
  Mat hess_xx(const Vec& x, const Vec& y, double z) const;
  Mat hess_xy(const Vec& x, const Vec& y, double z) const;  // (i,j) = g_{x_i y_j}
  Vec cross_xz(const Vec& x, const Vec& y, double z) const;  // g_{x_i z}
  Vec cross_yz(const Vec& x, const Vec& y, double z) const;  // g_{y_j z}

  void set_dual_z(DualZFn fn) { dual_z_ = std::move(fn); }
  const DualZFn& dual_z() const { return dual_z_; }

 private:
  int dim_;
  DomainBox domain_;
  EvalFn eval_;
  PartialFn analytic_;
  DualZFn dual_z_;
  std::string family_;
  std::vector<double> params_;
};

/// The matrix E of assumption A2: E_ij = g_{x_i y_j} - g_z^{-1} g_{x_i z} g_{y_j}.
Mat assemble_E(const GeneratingFunction& gf, const Vec& x, const Vec& y, double z);

/// Built-in families: bilinear, quad-cost, log-cost, sqrt-cost,
/// perturbed-bilinear (params = {epsilon}). Analytic derivatives throughout.
GeneratingFunction builtin(const std::string& name, const std::vector<double>& params = {},
                           int dim = 2);
GeneratingFunction builtin(const std::string& name, const std::vector<double>& params, int dim,
                           const DomainBox& domain);

/// Copy with analytic derivatives and closed-form dual stripped; evaluation
/// goes through the FD synthesis path. Used to exercise that path in tests.
GeneratingFunction without_analytic(const GeneratingFunction& gf);

struct A1Detection {
  Vec x;
  double u;
  Vec p;
  Vec y_a, y_b;
  double z_a, z_b;
};

struct ValidationReport {
  bool a0_ok = true;
  bool a1_ok = true;
  bool a2_ok = true;
  double worst_gz = 0.0;        // max of g_z over samples (pass needs < 0)
  double min_abs_detE = 0.0;    // min |det E| over samples
  double det_floor = tol::det_e_floor;
  FiberPoint worst_gz_point;
  FiberPoint worst_detE_point;
  std::vector<A1Detection> a1_detections;
  long samples = 0;
  long a1_probes = 0;
  long a1_failures = 0;  // Newton solves that did not converge from any seed
  uint64_t seed = 0;
  bool pass() const { return a0_ok && a1_ok && a2_ok; }
};

struct ValidationGrid {
  int x_res = 5;   // per x-axis
  int y_res = 5;   // per y-axis
  int z_res = 5;
  int a1_points = 20;
  int a1_seeds = 8;
  uint64_t seed = 12345;
};

/// Numerical spot-check of A0 (nonempty fibers), A1 (statistical, multi-start
/// Newton), and A2 (g_z < 0, |det E| above floor) on a sample grid.
ValidationReport validate_assumptions(const GeneratingFunction& gf,
                                      const ValidationGrid& grid = {});

}  // namespace gje
