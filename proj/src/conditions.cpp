#include "gje/conditions.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "gje/mate.hpp"
#include "gje/parallel.hpp"

namespace gje {

namespace {

double p_step(const Vec& p) {
  const double eps = std::numeric_limits<double>::epsilon();
  return std::pow(eps, 0.25) * (1.0 + p.norm());
}

double u_step(double u) {
  const double eps = std::numeric_limits<double>::epsilon();
  return std::cbrt(eps) * (1.0 + std::abs(u));
}

Vec unit_random(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(n);
  for (;;) {
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    double norm = v.norm();
    if (norm > 1e-8) return Vec(v / norm);
  }
}

double contract(const APTensor& t, const Vec& xi_i, const Vec& xi_j, const Vec& eta_k,
                const Vec& eta_l) {
  const int n = static_cast<int>(t.size());
  double s = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) s += eta_k[k] * eta_l[l] * xi_i.dot(t[k][l] * xi_j);
  return s;
}

}  // namespace

APTensor dp2_A(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
               std::optional<FiberPoint> seed) {
  const int n = gf.dim();
  const double h = p_step(p);

  ContactState center = solve_YZ(gf, x, u, p, seed);
  FiberPoint warm{x, center.y, center.z};
  Mat a0 = coeff_A(gf, x, u, p, warm);

  auto a_at = [&](const Vec& pp) { return coeff_A(gf, x, u, pp, warm); };

  APTensor t(n, std::vector<Mat>(n));
  for (int k = 0; k < n; ++k) {
    Vec pk_p = p, pk_m = p;
    pk_p[k] += h;
    pk_m[k] -= h;
    t[k][k] = (a_at(pk_p) - 2.0 * a0 + a_at(pk_m)) / (h * h);
    for (int l = k + 1; l < n; ++l) {
      Vec pp = p, pm = p, mp = p, mm = p;
      pp[k] += h;
      pp[l] += h;
      pm[k] += h;
      pm[l] -= h;
      mp[k] -= h;
      mp[l] += h;
      mm[k] -= h;
      mm[l] -= h;
      t[k][l] = (a_at(pp) - a_at(pm) - a_at(mp) + a_at(mm)) / (4.0 * h * h);
      t[l][k] = t[k][l];
    }
  }
  return t;
}

Mat du_A(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
         std::optional<FiberPoint> seed) {
  const double h = u_step(u);
  ContactState center = solve_YZ(gf, x, u, p, seed);
  FiberPoint warm{x, center.y, center.z};
  Mat ap = coeff_A(gf, x, u + h, p, warm);
  Mat am = coeff_A(gf, x, u - h, p, warm);
  return (ap - am) / (2.0 * h);
}

double a3w_form_raw(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                    const Vec& xi, const Vec& eta) {
  APTensor t = dp2_A(gf, x, u, p);
  return contract(t, xi, xi, eta, eta);
}

double a3w_form(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                const Vec& xi, const Vec& eta) {
  Vec xin = Vec(xi / xi.norm());
  Vec perp = Vec(eta - xin.dot(eta) * xin);
  double norm = perp.norm();
  if (norm < 1e-12) return 0.0;
  perp /= norm;
  return a3w_form_raw(gf, x, u, p, xin, perp);
}

std::pair<double, double> a3w_relaxed_check(const GeneratingFunction& gf, const Vec& x, double u,
                                            const Vec& p, const Vec& xi, const Vec& eta,
                                            double K) {
  double lhs = a3w_form_raw(gf, x, u, p, xi, eta);
  double rhs = -K * xi.norm() * eta.norm() * std::abs(xi.dot(eta));
  return {lhs, rhs};
}

double a4w_form(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                const Vec& xi) {
  Mat d = du_A(gf, x, u, p);
  return xi.dot(d * xi);
}

ConditionReport scan_conditions(const GeneratingFunction& gf, const ScanOptions& opts) {
  const int n = gf.dim();
  ConditionReport report;
  report.seed = opts.seed;
  report.pass_tolerance = opts.pass_tolerance;
  report.worst_a3w = std::numeric_limits<double>::infinity();
  report.worst_a4w = std::numeric_limits<double>::infinity();

  // Sample Gamma and map each point to (x, u, p) = (x, g, g_x); this keeps
  // every scanned point inside the admissible set by construction.
  std::vector<FiberPoint> points;
  auto axis = [](double lo, double hi, int res, int i) {
    return lo + (hi - lo) * (i + 0.5) / res;
  };
  for (int ix = 0; ix < opts.x_res; ++ix)
    for (int jx = 0; jx < opts.x_res; ++jx)
      for (int iy = 0; iy < opts.y_res; ++iy)
        for (int jy = 0; jy < opts.y_res; ++jy) {
          Vec x(n), y(n);
          if (n != 2) throw Error("scan_conditions: sampling implemented for n = 2");
          x[0] = axis(gf.domain().x_lo[0], gf.domain().x_hi[0], opts.x_res, ix);
          x[1] = axis(gf.domain().x_lo[1], gf.domain().x_hi[1], opts.x_res, jx);
          y[0] = axis(gf.domain().y_lo[0], gf.domain().y_hi[0], opts.y_res, iy);
          y[1] = axis(gf.domain().y_lo[1], gf.domain().y_hi[1], opts.y_res, jy);
          auto [zl, zh] = gf.domain().z_interval(x, y);
          for (int kz = 0; kz < opts.z_res; ++kz)
            points.push_back({x, y, zl + (zh - zl) * (kz + 0.5) / opts.z_res});
        }

  const int axis_pairs = 4;
  report.direction_pairs = opts.random_pairs + axis_pairs;

  struct PointResult {
    bool ok = false;
    double worst_a3w = std::numeric_limits<double>::infinity();
    double worst_a4w = std::numeric_limits<double>::infinity();
    double k_est = 0.0;
    ConditionWitness a3w_witness, a4w_witness;
  };
  std::vector<PointResult> results(points.size());

  parallel_for(points.size(), [&](std::size_t idx) {
    const FiberPoint& fp = points[idx];
    PointResult& r = results[idx];
    // Per-point RNG keyed by index: deterministic regardless of threading.
    std::mt19937_64 rng(opts.seed + 0x9e3779b97f4a7c15ULL * (idx + 1));
    try {
      double u = gf.eval(fp.x, fp.y, fp.z);
      Vec p = gf.grad_x(fp.x, fp.y, fp.z);
      // Default seeding, so that re-evaluating a witness through the public
      // entry points reproduces the recorded value exactly.
      APTensor t = dp2_A(gf, fp.x, u, p);
      Mat dua = du_A(gf, fp.x, u, p);

      std::vector<std::pair<Vec, Vec>> pairs;
      Vec e0 = Vec::Zero(n), e1 = Vec::Zero(n);
      e0[0] = 1.0;
      e1[1] = 1.0;
      Vec d0 = Vec((e0 + e1) / std::sqrt(2.0)), d1 = Vec((e0 - e1) / std::sqrt(2.0));
      pairs.push_back({e0, e1});
      pairs.push_back({e1, e0});
      pairs.push_back({d0, d1});
      pairs.push_back({d1, d0});
      for (int k = 0; k < opts.random_pairs; ++k) {
        Vec xi = unit_random(n, rng);
        Vec eta = unit_random(n, rng);
        Vec perp = Vec(eta - xi.dot(eta) * xi);
        if (perp.norm() < 1e-8) {
          --k;
          continue;
        }
        perp /= perp.norm();
        pairs.push_back({xi, perp});
      }

      for (const auto& [xi, eta] : pairs) {
        double v3 = contract(t, xi, xi, eta, eta);
        if (v3 < r.worst_a3w) {
          r.worst_a3w = v3;
          r.a3w_witness = {fp.x, u, p, xi, eta, v3};
        }
        double v4 = xi.dot(dua * xi);
        if (v4 < r.worst_a4w) {
          r.worst_a4w = v4;
          r.a4w_witness = {fp.x, u, p, xi, Vec(), v4};
        }
      }

      for (int k = 0; k < opts.k_tuples; ++k) {
        Vec a = unit_random(n, rng), b = unit_random(n, rng);
        Vec c = unit_random(n, rng), d = unit_random(n, rng);
        r.k_est = std::max(r.k_est, std::abs(contract(t, a, b, c, d)));
      }
      r.ok = true;
    } catch (const Error&) {
      r.ok = false;
    }
  });

  for (const auto& r : results) {
    if (!r.ok) {
      ++report.skipped;
      continue;
    }
    ++report.points;
    if (r.worst_a3w < report.worst_a3w) {
      report.worst_a3w = r.worst_a3w;
      report.a3w_witness = r.a3w_witness;
    }
    if (r.worst_a4w < report.worst_a4w) {
      report.worst_a4w = r.worst_a4w;
      report.a4w_witness = r.a4w_witness;
    }
    report.k_est = std::max(report.k_est, r.k_est);
  }
  return report;
}

}  // namespace gje
