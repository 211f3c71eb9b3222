#include "gje/duality.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "gje/parallel.hpp"

namespace gje {

namespace {

// Residual and Jacobian of the contact system in unknowns (y, z).
void yz_residual(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                 const Vec& y, double z, Vec& r, Mat& jac) {
  const int n = gf.dim();
  r.resize(n + 1);
  r[0] = gf.eval(x, y, z) - u;
  r.tail(n) = gf.grad_x(x, y, z) - p;
  jac.resize(n + 1, n + 1);
  jac.row(0).head(n) = gf.grad_y(x, y, z).transpose();
  jac(0, n) = gf.dz(x, y, z);
  jac.block(1, 0, n, n) = gf.hess_xy(x, y, z);
  jac.block(1, n, n, 1) = gf.cross_xz(x, y, z);
}

bool fiber_contains(const GeneratingFunction& gf, const Vec& x, const Vec& y, double z) {
  // Closed-fiber check with a rounding allowance: contacts that land exactly
  // on the box face (e.g. gradients touching the image boundary) stay valid.
  if (!gf.domain().contains_y(y, -1e-9)) return false;
  auto [zl, zh] = gf.domain().z_interval(x, y);
  return z > zl - 1e-9 && z < zh + 1e-9;
}

}  // namespace

ContactState solve_YZ(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                      std::optional<FiberPoint> seed, const NewtonOptions& opts) {
  const int n = gf.dim();
  if (!gf.domain().contains_x(x)) throw LeftDomain("solve_YZ: x outside the x-box");

  Vec y;
  double z;
  if (seed) {
    y = seed->y;
    z = seed->z;
  } else {
    y = gf.domain().y_center();
    z = gf.domain().z_center(x, y);
  }

  Vec r;
  Mat jac;
  ContactState out;
  out.x = x;
  out.u = u;
  out.p = p;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    yz_residual(gf, x, u, p, y, z, r, jac);
    double rn = r.norm();
    if (rn < opts.tolerance) {
      if (opts.polish) {
        // One extra full step: quadratic convergence buys several digits,
        // which downstream finite differences of Y rely on.
        Vec step = jac.fullPivLu().solve(-r);
        Vec y2 = y + step.head(n);
        double z2 = z + step[n];
        if (fiber_contains(gf, x, y2, z2)) {
          y = y2;
          z = z2;
          yz_residual(gf, x, u, p, y, z, r, jac);
          rn = r.norm();
        }
      }
      out.y = y;
      out.z = z;
      out.residual = rn;
      out.iterations = iter;
      return out;
    }
    Vec step = jac.fullPivLu().solve(-r);
    double scale = 1.0;
    int damping = 0;
    while (damping <= opts.max_damping) {
      Vec y2 = y + scale * step.head(n);
      double z2 = z + scale * step[n];
      if (fiber_contains(gf, x, y2, z2)) {
        y = y2;
        z = z2;
        break;
      }
      scale *= 0.5;
      ++damping;
    }
    if (damping > opts.max_damping)
      throw LeftDomain("solve_YZ: iterate cannot stay inside Gamma");
  }
  throw NoConvergence("solve_YZ: no convergence within max iterations");
}

std::vector<ContactState> solve_YZ_multistart(const GeneratingFunction& gf, const Vec& x,
                                              double u, const Vec& p, int seeds,
                                              uint64_t rng_seed, const NewtonOptions& opts) {
  const int n = gf.dim();
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Latin hypercube over the fiber (y-box x z-interval).
  std::vector<std::vector<int>> strata(n + 1, std::vector<int>(seeds));
  for (auto& axis : strata) {
    for (int s = 0; s < seeds; ++s) axis[s] = s;
    std::shuffle(axis.begin(), axis.end(), rng);
  }

  std::vector<ContactState> found;
  for (int s = 0; s < seeds; ++s) {
    FiberPoint seed;
    seed.x = x;
    seed.y.resize(n);
    for (int i = 0; i < n; ++i) {
      double t = (strata[i][s] + unif(rng)) / seeds;
      seed.y[i] = gf.domain().y_lo[i] + t * gf.domain().y_width(i);
    }
    auto [zl, zh] = gf.domain().z_interval(x, seed.y);
    double tz = (strata[n][s] + unif(rng)) / seeds;
    seed.z = zl + tz * (zh - zl);
    try {
      ContactState cs = solve_YZ(gf, x, u, p, seed, opts);
      bool duplicate = false;
      for (const auto& prev : found) {
        if ((prev.y - cs.y).norm() + std::abs(prev.z - cs.z) < 1e-6) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) found.push_back(std::move(cs));
    } catch (const Error&) {
      // Seed did not converge; statistical validation tolerates this.
    }
  }
  return found;
}

double dual_g(const GeneratingFunction& gf, const Vec& x, const Vec& y, double u) {
  auto [zl, zh] = gf.domain().z_interval(x, y);
  if (zl >= zh) throw OutOfRange("dual_g: empty fiber interval");

  if (gf.dual_z()) {
    double z = gf.dual_z()(x, y, u);
    if (z < zl - 1e-9 || z > zh + 1e-9)
      throw OutOfRange("dual_g: u outside the range of g(x,y,.) over the fiber");
    return std::min(std::max(z, zl), zh);
  }

  // g_z < 0: g(x,y,.) decreases across the fiber, so the range is
  // [g(zh), g(zl)] and bisection is bracketed.
  double ga = gf.eval(x, y, zl), gb = gf.eval(x, y, zh);
  const double slack = tie_tolerance(std::abs(u));
  if (u > ga + slack || u < gb - slack)
    throw OutOfRange("dual_g: u outside the range of g(x,y,.) over the fiber");

  double lo = zl, hi = zh;
  for (int iter = 0; iter < 200 && hi - lo > tol::dual_root; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (gf.eval(x, y, mid) > u)
      lo = mid;
    else
      hi = mid;
  }
  double z = 0.5 * (lo + hi);
  for (int polish = 0; polish < 3; ++polish) {
    double gz = gf.dz(x, y, z);
    if (gz == 0.0) break;
    double z2 = z - (gf.eval(x, y, z) - u) / gz;
    if (z2 < zl || z2 > zh) break;
    z = z2;
  }
  return z;
}

Vec dual_g_grad_y(const GeneratingFunction& gf, const Vec& x, const Vec& y, double u) {
  double z = dual_g(gf, x, y, u);
  return Vec(-gf.grad_y(x, y, z) / gf.dz(x, y, z));
}

DualContactState solve_XU(const GeneratingFunction& gf, const Vec& y, double z, const Vec& q,
                          std::optional<Vec> seed_x, const NewtonOptions& opts) {
  const int n = gf.dim();
  if (!gf.domain().contains_y(y)) throw LeftDomain("solve_XU: y outside the y-box");

  Vec x = seed_x ? *seed_x : gf.domain().x_center();
  double u = gf.eval(x, y, z);

  DualContactState out;
  out.y = y;
  out.z = z;
  out.q = q;

  Vec r(n + 1);
  Mat jac(n + 1, n + 1);
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    // Residual via the primal identities: g*(x,y,u) = z and
    // g*_y(x,y,u) = -(g_y/g_z)(x,y,g*).
    double zs;
    try {
      zs = dual_g(gf, x, y, u);
    } catch (const OutOfRange&) {
      throw LeftDomain("solve_XU: iterate left the admissible (x,u) set");
    }
    double gz = gf.dz(x, y, zs);
    Vec gy = gf.grad_y(x, y, zs);
    r[0] = zs - z;
    r.tail(n) = -gy / gz - q;

    double rn = r.norm();
    if (rn < opts.tolerance) {
      out.x = x;
      out.u = u;
      out.residual = rn;
      out.iterations = iter;
      return out;
    }

    // Analytic Jacobian rows: d g*/dx = -g_x/g_z, d g*/du = 1/g_z;
    // d(g*_y)/dx_i = -(E_im/g_z + W_m zs_x_i), d(g*_y)/du = -W_m / g_z,
    // with W_m = (g_{y_m z} g_z - g_{y_m} g_zz)/g_z^2.
    Vec gx = gf.grad_x(x, y, zs);
    double gzz = gf.dzz(x, y, zs);
    Vec gyz = gf.cross_yz(x, y, zs);
    Mat e = assemble_E(gf, x, y, zs);
    Vec w = (gyz * gz - gy * gzz) / (gz * gz);
    jac.row(0).head(n) = (-gx / gz).transpose();
    jac(0, n) = 1.0 / gz;
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        jac(1 + m, i) = -(e(i, m) / gz + w[m] * (-gx[i] / gz));
    jac.block(1, n, n, 1) = -w / gz;

    Vec step = jac.fullPivLu().solve(-r);
    double scale = 1.0;
    int damping = 0;
    while (damping <= opts.max_damping) {
      Vec x2 = x + scale * step.head(n);
      double u2 = u + scale * step[n];
      if (gf.domain().contains_x(x2)) {
        bool admissible = true;
        try {
          dual_g(gf, x2, y, u2);
        } catch (const OutOfRange&) {
          admissible = false;
        }
        if (admissible) {
          x = x2;
          u = u2;
          break;
        }
      }
      scale *= 0.5;
      ++damping;
    }
    if (damping > opts.max_damping)
      throw LeftDomain("solve_XU: iterate cannot stay inside the dual domain");
  }
  throw NoConvergence("solve_XU: no convergence within max iterations");
}

GeneratingFunction dual_function_object(const GeneratingFunction& gf) {
  const int n = gf.dim();
  DomainBox dual_domain;
  dual_domain.x_lo = gf.domain().y_lo;
  dual_domain.x_hi = gf.domain().y_hi;
  dual_domain.y_lo = gf.domain().x_lo;
  dual_domain.y_hi = gf.domain().x_hi;
  // The dual fiber is the u-range of g over I_{x,y}; g_z < 0 flips endpoints.
  // Inset slightly to keep the interval open.
  dual_domain.z_lo = [g = gf](const Vec& eta, const Vec& xi) {
    auto [zl, zh] = g.domain().z_interval(xi, eta);
    double a = g.eval(xi, eta, zh), b = g.eval(xi, eta, zl);
    return a + 1e-12 * (b - a);
  };
  dual_domain.z_hi = [g = gf](const Vec& eta, const Vec& xi) {
    auto [zl, zh] = g.domain().z_interval(xi, eta);
    double a = g.eval(xi, eta, zh), b = g.eval(xi, eta, zl);
    return b - 1e-12 * (b - a);
  };

  EvalFn eval = [g = gf](const Vec& eta, const Vec& xi, double w) {
    return dual_g(g, xi, eta, w);
  };

  PartialFn analytic = nullptr;
  const std::string& fam = gf.family();
  if (fam == "bilinear" || fam == "quad-cost" || fam == "log-cost" || fam == "sqrt-cost") {
    // For phi(z) = -z the dual is g*(x,y,u) = c(x,y) - u with c(x,y) = g(x,y,0):
    // swap the x/y derivative orders and reuse the primal analytic engine.
    analytic = [g = gf, n](const Vec& eta, const Vec& xi, double w, const PartialSpec& spec) {
      if (spec.z > 0) {
        if (spec.x_total() + spec.y_total() > 0) return 0.0;
        return spec.z == 1 ? -1.0 : 0.0;
      }
      if (spec.total() == 0) return g.eval(xi, eta, 0.0) - w;
      PartialSpec swapped(n);
      swapped.x = spec.y;
      swapped.y = spec.x;
      return g.partial(xi, eta, 0.0, swapped);
    };
  }

  GeneratingFunction dual(n, dual_domain, std::move(eval), std::move(analytic),
                          gf.family() + "-dual", gf.params());
  // Dual of the dual: the w with g*(xi,eta,w) = v, which by the involution
  // identities is w = g(xi,eta,v).
  dual.set_dual_z(
      [g = gf](const Vec& eta, const Vec& xi, double v) { return g.eval(xi, eta, v); });
  return dual;
}

GridPotential TransformResult::potential() const {
  if (invalid_nodes > 0) throw Error("TransformResult: grid contains invalid nodes");
  return GridPotential(axis0, axis1, values);
}

namespace {

enum class FastDual { None, Bilinear, Quad, Log, Sqrt };

FastDual fast_dual_kind(const GeneratingFunction& gf) {
  const std::string& f = gf.family();
  if (f == "bilinear") return FastDual::Bilinear;
  if (f == "quad-cost") return FastDual::Quad;
  if (f == "log-cost") return FastDual::Log;
  if (f == "sqrt-cost") return FastDual::Sqrt;
  return FastDual::None;
}

inline double fast_dual_value(FastDual kind, double x0, double x1, double y0, double y1,
                              double u) {
  switch (kind) {
    case FastDual::Bilinear:
      return x0 * y0 + x1 * y1 - u;
    case FastDual::Quad: {
      double d0 = x0 - y0, d1 = x1 - y1;
      return -0.5 * (d0 * d0 + d1 * d1) - u;
    }
    case FastDual::Log: {
      double d0 = x0 - y0, d1 = x1 - y1;
      return -0.5 * std::log(d0 * d0 + d1 * d1) - u;
    }
    case FastDual::Sqrt: {
      double d0 = x0 - y0, d1 = x1 - y1;
      return -std::sqrt(1.0 + d0 * d0 + d1 * d1) - u;
    }
    case FastDual::None:
      break;
  }
  return 0.0;
}

// Shared sup-transform core. source grid carries the potential; for each
// target node the kernel k(source_node, target_point) is maximized.
TransformResult sup_transform(const Vec& t_axis0, const Vec& t_axis1, int sn0, int sn1,
                              const std::function<double(int, int, const Vec&)>& kernel) {
  TransformResult out;
  out.axis0 = t_axis0;
  out.axis1 = t_axis1;
  const int n0 = out.n0(), n1 = out.n1();
  out.values = Mat::Constant(n0, n1, std::numeric_limits<double>::quiet_NaN());
  out.argmax.resize(static_cast<std::size_t>(n0) * n1);
  out.valid.assign(static_cast<std::size_t>(n0) * n1, 0);

  std::vector<long> skipped(n0, 0);
  std::vector<long> invalid(n0, 0);

  parallel_for(n0, [&](std::size_t ii) {
    int i = static_cast<int>(ii);
    Mat buffer(sn0, sn1);
    Vec t(2);
    for (int j = 0; j < n1; ++j) {
      t[0] = t_axis0[i];
      t[1] = t_axis1[j];
      double best = -std::numeric_limits<double>::infinity();
      long skip_here = 0;
      for (int a = 0; a < sn0; ++a)
        for (int b = 0; b < sn1; ++b) {
          double val;
          try {
            val = kernel(a, b, t);
          } catch (const Error&) {
            val = std::numeric_limits<double>::quiet_NaN();
          }
          buffer(a, b) = val;
          if (std::isnan(val)) {
            ++skip_here;
            continue;
          }
          if (val > best) best = val;
        }
      skipped[i] += skip_here;
      std::size_t node = out.flat(i, j);
      if (!std::isfinite(best)) {
        ++invalid[i];
        continue;
      }
      out.values(i, j) = best;
      out.valid[node] = 1;
      double tol_here = tie_tolerance(best);
      for (int a = 0; a < sn0; ++a)
        for (int b = 0; b < sn1; ++b)
          if (!std::isnan(buffer(a, b)) && buffer(a, b) >= best - tol_here)
            out.argmax[node].emplace_back(a, b);
    }
  });
  for (long s : skipped) out.skipped_points += s;
  for (long s : invalid) out.invalid_nodes += s;
  return out;
}

}  // namespace

TransformResult g_star_transform(const GeneratingFunction& gf, const GridPotential& u,
                                 const Vec& y_axis0, const Vec& y_axis1) {
  const FastDual fast = fast_dual_kind(gf);
  const int sn0 = u.n0(), sn1 = u.n1();
  const Vec& ax0 = u.axis0();
  const Vec& ax1 = u.axis1();
  const Mat& uv = u.values();

  // Constant fiber bounds are the common case; probe once.
  Vec xc = gf.domain().x_center(), yc = gf.domain().y_center();
  auto [zl0, zh0] = gf.domain().z_interval(xc, yc);

  std::function<double(int, int, const Vec&)> kernel;
  if (fast != FastDual::None) {
    kernel = [&, fast, zl0, zh0](int a, int b, const Vec& y) {
      double z = fast_dual_value(fast, ax0[a], ax1[b], y[0], y[1], uv(a, b));
      if (z < zl0 || z > zh0) return std::numeric_limits<double>::quiet_NaN();
      return z;
    };
  } else {
    kernel = [&](int a, int b, const Vec& y) {
      Vec x(2);
      x[0] = ax0[a];
      x[1] = ax1[b];
      try {
        return dual_g(gf, x, y, uv(a, b));
      } catch (const OutOfRange&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
  }
  return sup_transform(y_axis0, y_axis1, sn0, sn1, kernel);
}

TransformResult g_transform(const GeneratingFunction& gf, const GridPotential& v,
                            const Vec& x_axis0, const Vec& x_axis1) {
  const int sn0 = v.n0(), sn1 = v.n1();
  const Vec& ax0 = v.axis0();
  const Vec& ax1 = v.axis1();
  const Mat& vv = v.values();

  Vec xc = gf.domain().x_center(), yc = gf.domain().y_center();
  auto [zl0, zh0] = gf.domain().z_interval(xc, yc);

  auto kernel = [&, zl0, zh0](int a, int b, const Vec& x) {
    double z = vv(a, b);
    if (z < zl0 || z > zh0) return std::numeric_limits<double>::quiet_NaN();
    Vec y(2);
    y[0] = ax0[a];
    y[1] = ax1[b];
    return gf.eval(x, y, z);
  };
  return sup_transform(x_axis0, x_axis1, sn0, sn1, kernel);
}

}  // namespace gje
