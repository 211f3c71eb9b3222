#include "gje/genfun.hpp"

#include <cmath>

#include "gje/fd.hpp"

namespace gje {

GeneratingFunction::GeneratingFunction(int dim, DomainBox domain, EvalFn eval,
                                       PartialFn analytic, std::string family,
                                       std::vector<double> params)
    : dim_(dim),
      domain_(std::move(domain)),
      eval_(std::move(eval)),
      analytic_(std::move(analytic)),
      family_(std::move(family)),
      params_(std::move(params)) {}

double GeneratingFunction::partial(const Vec& x, const Vec& y, double z,
                                   const PartialSpec& spec) const {
  if (spec.total() > 4) throw Error("partial: total derivative order > 4");
  if (spec.total() == 0) return eval_(x, y, z);
  if (analytic_) return analytic_(x, y, z, spec);

  // FD synthesis on the flattened (x, y, z) vector.
  const int n = dim_;
  Vec v(2 * n + 1);
  v.head(n) = x;
  v.segment(n, n) = y;
  v[2 * n] = z;

  VecI multi(2 * n + 1);
  multi.head(n) = spec.x;
  multi.segment(n, n) = spec.y;
  multi[2 * n] = spec.z;

  auto [zl, zh] = domain_.z_interval(x, y);
  Vec steps(2 * n + 1);
  const int k = spec.total();
  for (int i = 0; i < n; ++i) steps[i] = fd_step(k, domain_.x_width(i));
  for (int i = 0; i < n; ++i) steps[n + i] = fd_step(k, domain_.y_width(i));
  steps[2 * n] = fd_step(k, zh - zl);

  FlatFn flat = [this, n](const Vec& w) {
    Vec xx = w.head(n);
    Vec yy = w.segment(n, n);
    double zz = w[2 * n];
    if (!domain_.contains(xx, yy, zz, -1e-12))
      throw StencilError("fd stencil leaves the domain");
    return eval_(xx, yy, zz);
  };
  return fd_partial_flat(flat, v, multi, steps);
}

Vec GeneratingFunction::grad_x(const Vec& x, const Vec& y, double z) const {
  Vec g(dim_);
  for (int i = 0; i < dim_; ++i) g[i] = partial(x, y, z, PartialSpec(dim_).dx(i));
  return g;
}

Vec GeneratingFunction::grad_y(const Vec& x, const Vec& y, double z) const {
  Vec g(dim_);
  for (int j = 0; j < dim_; ++j) g[j] = partial(x, y, z, PartialSpec(dim_).dy(j));
  return g;
}

double GeneratingFunction::dz(const Vec& x, const Vec& y, double z) const {
  return partial(x, y, z, PartialSpec(dim_).dz());
}

double GeneratingFunction::dzz(const Vec& x, const Vec& y, double z) const {
  return partial(x, y, z, PartialSpec(dim_).dz(2));
}

Mat GeneratingFunction::hess_xx(const Vec& x, const Vec& y, double z) const {
  Mat h(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) {
      h(i, j) = partial(x, y, z, PartialSpec(dim_).dx(i).dx(j));
      h(j, i) = h(i, j);
    }
  return h;
}

Mat GeneratingFunction::hess_xy(const Vec& x, const Vec& y, double z) const {
  Mat h(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      h(i, j) = partial(x, y, z, PartialSpec(dim_).dx(i).dy(j));
  return h;
}

Vec GeneratingFunction::cross_xz(const Vec& x, const Vec& y, double z) const {
  Vec g(dim_);
  for (int i = 0; i < dim_; ++i) g[i] = partial(x, y, z, PartialSpec(dim_).dx(i).dz());
  return g;
}

Vec GeneratingFunction::cross_yz(const Vec& x, const Vec& y, double z) const {
  Vec g(dim_);
  for (int j = 0; j < dim_; ++j) g[j] = partial(x, y, z, PartialSpec(dim_).dy(j).dz());
  return g;
}

Mat assemble_E(const GeneratingFunction& gf, const Vec& x, const Vec& y, double z) {
  Mat e = gf.hess_xy(x, y, z);
  double gz = gf.dz(x, y, z);
  Vec gxz = gf.cross_xz(x, y, z);
  if (gxz.isZero(0.0)) return e;
  Vec gy = gf.grad_y(x, y, z);
  e -= (gxz / gz) * gy.transpose();
  return e;
}

namespace {

// Built-in families share the separable form g(x,y,z) = c(x,y) + phi(z),
// so any partial mixing z with x or y vanishes.

enum class CostKind { Bilinear, Quad, Log, Sqrt };

// Derivatives of f(s) at s = |x-y|^2, orders 0..4.
void radial_f(CostKind kind, double s, double f[5]) {
  switch (kind) {
    case CostKind::Quad:
      f[0] = -0.5 * s;
      f[1] = -0.5;
      f[2] = f[3] = f[4] = 0.0;
      break;
    case CostKind::Log:
      f[0] = -0.5 * std::log(s);
      f[1] = -0.5 / s;
      f[2] = 0.5 / (s * s);
      f[3] = -1.0 / (s * s * s);
      f[4] = 3.0 / (s * s * s * s);
      break;
    case CostKind::Sqrt: {
      double r = std::sqrt(1.0 + s);
      f[0] = -r;
      f[1] = -0.5 / r;
      f[2] = 0.25 / (r * r * r);
      f[3] = -0.375 / (r * r * r * r * r);
      f[4] = 0.9375 / (r * r * r * r * r * r * r);
      break;
    }
    case CostKind::Bilinear:
      throw Error("radial_f: bilinear is not a radial cost");
  }
}

// D^alpha of F(d) = f(|d|^2) for |alpha| <= 4, alpha given as an axis list.
double radial_partial(CostKind kind, const Vec& d, const std::vector<int>& ax) {
  double f[5] = {0.0, 0.0, 0.0, 0.0, 0.0};
  radial_f(kind, d.squaredNorm(), f);
  auto del = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  switch (ax.size()) {
    case 0:
      return f[0];
    case 1:
      return 2.0 * f[1] * d[ax[0]];
    case 2: {
      int i = ax[0], j = ax[1];
      return 4.0 * f[2] * d[i] * d[j] + 2.0 * f[1] * del(i, j);
    }
    case 3: {
      int i = ax[0], j = ax[1], k = ax[2];
      return 8.0 * f[3] * d[i] * d[j] * d[k] +
             4.0 * f[2] * (del(i, j) * d[k] + del(i, k) * d[j] + del(j, k) * d[i]);
    }
    case 4: {
      int i = ax[0], j = ax[1], k = ax[2], l = ax[3];
      double t4 = 16.0 * f[4] * d[i] * d[j] * d[k] * d[l];
      double t3 = 8.0 * f[3] *
                  (del(i, j) * d[k] * d[l] + del(i, k) * d[j] * d[l] + del(i, l) * d[j] * d[k] +
                   del(j, k) * d[i] * d[l] + del(j, l) * d[i] * d[k] + del(k, l) * d[i] * d[j]);
      double t2 = 4.0 * f[2] *
                  (del(i, j) * del(k, l) + del(i, k) * del(j, l) + del(i, l) * del(j, k));
      return t4 + t3 + t2;
    }
    default:
      throw Error("radial_partial: order > 4");
  }
}

// c(x,y) partial for a radial cost: D^a_x D^b_y c = (-1)^|b| D^{a+b} F(x-y).
double radial_cost_partial(CostKind kind, const Vec& x, const Vec& y, const PartialSpec& spec) {
  std::vector<int> axes;
  for (int i = 0; i < spec.x.size(); ++i)
    for (int k = 0; k < spec.x[i]; ++k) axes.push_back(i);
  for (int j = 0; j < spec.y.size(); ++j)
    for (int k = 0; k < spec.y[j]; ++k) axes.push_back(j);
  double sign = (spec.y_total() % 2 == 0) ? 1.0 : -1.0;
  return sign * radial_partial(kind, Vec(x - y), axes);
}

double bilinear_cost_partial(const Vec& x, const Vec& y, const PartialSpec& spec) {
  int xt = spec.x_total(), yt = spec.y_total();
  if (xt == 0 && yt == 0) return x.dot(y);
  if (xt > 1 || yt > 1) return 0.0;
  int i = -1, j = -1;
  for (int a = 0; a < spec.x.size(); ++a)
    if (spec.x[a] == 1) i = a;
  for (int a = 0; a < spec.y.size(); ++a)
    if (spec.y[a] == 1) j = a;
  if (xt == 1 && yt == 0) return y[i];
  if (xt == 0 && yt == 1) return x[j];
  return i == j ? 1.0 : 0.0;
}

// phi(z) = -z, or -z + (eps/2) z^2 for the perturbed family.
double phi_partial(double eps, double z, int order) {
  switch (order) {
    case 0:
      return -z + 0.5 * eps * z * z;
    case 1:
      return -1.0 + eps * z;
    case 2:
      return eps;
    default:
      return 0.0;
  }
}

struct FamilySpec {
  CostKind kind;
  double eps = 0.0;  // z-perturbation strength; 0 means phi(z) = -z
};

double family_eval(const FamilySpec& fam, const Vec& x, const Vec& y, double z) {
  double c = (fam.kind == CostKind::Bilinear)
                 ? x.dot(y)
                 : radial_partial(fam.kind, Vec(x - y), {});
  return c + phi_partial(fam.eps, z, 0);
}

double family_partial(const FamilySpec& fam, const Vec& x, const Vec& y, double z,
                      const PartialSpec& spec) {
  int xy_order = spec.x_total() + spec.y_total();
  if (spec.z > 0 && xy_order > 0) return 0.0;  // separable in z
  if (spec.z > 0) return phi_partial(fam.eps, z, spec.z);
  if (fam.kind == CostKind::Bilinear) {
    double c = bilinear_cost_partial(x, y, spec);
    return xy_order == 0 ? c + phi_partial(fam.eps, z, 0) : c;
  }
  double c = radial_cost_partial(fam.kind, x, y, spec);
  return xy_order == 0 ? c + phi_partial(fam.eps, z, 0) : c;
}

// Minimum separation between the x-box and y-box (for log-cost validity).
double box_separation(const DomainBox& d) {
  double s2 = 0.0;
  for (int i = 0; i < d.dim(); ++i) {
    double gap = std::max({0.0, d.y_lo[i] - d.x_hi[i], d.x_lo[i] - d.y_hi[i]});
    s2 += gap * gap;
  }
  return std::sqrt(s2);
}

GeneratingFunction make_family(const std::string& name, const FamilySpec& fam, int dim,
                               const DomainBox& domain, std::vector<double> params) {
  EvalFn eval = [fam](const Vec& x, const Vec& y, double z) {
    return family_eval(fam, x, y, z);
  };
  PartialFn part = [fam](const Vec& x, const Vec& y, double z, const PartialSpec& spec) {
    return family_partial(fam, x, y, z, spec);
  };
  GeneratingFunction gf(dim, domain, std::move(eval), std::move(part), name, std::move(params));

  if (fam.eps == 0.0) {
    // phi(z) = -z: the dual generating function is c(x,y) - u.
    CostKind kind = fam.kind;
    gf.set_dual_z([kind](const Vec& x, const Vec& y, double u) {
      double c = (kind == CostKind::Bilinear) ? x.dot(y) : radial_partial(kind, Vec(x - y), {});
      return c - u;
    });
  } else {
    double eps = fam.eps;
    CostKind kind = fam.kind;
    gf.set_dual_z([eps, kind](const Vec& x, const Vec& y, double u) {
      double c = (kind == CostKind::Bilinear) ? x.dot(y) : radial_partial(kind, Vec(x - y), {});
      double disc = 1.0 + 2.0 * eps * (u - c);
      if (disc < 0.0) throw OutOfRange("dual_z: u outside the range of g(x,y,.)");
      return (1.0 - std::sqrt(disc)) / eps;  // branch with g_z < 0
    });
  }
  return gf;
}

}  // namespace

GeneratingFunction builtin(const std::string& name, const std::vector<double>& params, int dim) {
  DomainBox domain;
  if (name == "log-cost")
    domain = DomainBox::cube(dim, 0.0, 1.0, 2.0, 3.0, -6.0, 6.0);
  else
    domain = DomainBox::cube(dim, -1.0, 1.0, -1.0, 1.0, -6.0, 6.0);
  return builtin(name, params, dim, domain);
}

GeneratingFunction builtin(const std::string& name, const std::vector<double>& params, int dim,
                           const DomainBox& domain) {
  if (name == "bilinear") return make_family(name, {CostKind::Bilinear, 0.0}, dim, domain, params);
  if (name == "quad-cost") return make_family(name, {CostKind::Quad, 0.0}, dim, domain, params);
  if (name == "sqrt-cost") return make_family(name, {CostKind::Sqrt, 0.0}, dim, domain, params);
  if (name == "log-cost") {
    if (box_separation(domain) <= 0.0)
      throw Error("log-cost: x-box and y-box must be separated (|x-y| bounded away from 0)");
    return make_family(name, {CostKind::Log, 0.0}, dim, domain, params);
  }
  if (name == "perturbed-bilinear") {
    double eps = params.empty() ? 0.1 : params[0];
    if (eps <= 0.0) throw Error("perturbed-bilinear: epsilon must be positive");
    // g_z = -1 + eps z must stay negative on the z-box.
    double zh = domain.z_hi(domain.x_center(), domain.y_center());
    double zl = domain.z_lo(domain.x_center(), domain.y_center());
    if (zh >= 1.0 / eps)
      throw Error("perturbed-bilinear: z-box must satisfy z < 1/epsilon to keep g_z < 0");
    // phi must be strictly decreasing across the fiber; spot-check.
    for (double z : {zl, 0.5 * (zl + zh), zh})
      if (phi_partial(eps, z, 1) >= 0.0)
        throw Error("perturbed-bilinear: g_z >= 0 inside the z-box");
    return make_family(name, {CostKind::Bilinear, eps}, dim, domain, {eps});
  }
  throw Error("unknown generating-function family: " + name);
}

GeneratingFunction without_analytic(const GeneratingFunction& gf) {
  EvalFn eval = [g = gf](const Vec& x, const Vec& y, double z) { return g.eval(x, y, z); };
  return GeneratingFunction(gf.dim(), gf.domain(), std::move(eval), nullptr,
                            gf.family() + "-fd", gf.params());
}

}  // namespace gje
