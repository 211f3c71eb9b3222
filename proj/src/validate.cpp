#include <cmath>
#include <random>

#include "gje/duality.hpp"
#include "gje/genfun.hpp"

namespace gje {

ValidationReport validate_assumptions(const GeneratingFunction& gf, const ValidationGrid& grid) {
  const int n = gf.dim();
  ValidationReport report;
  report.seed = grid.seed;
  report.worst_gz = -std::numeric_limits<double>::infinity();
  report.min_abs_detE = std::numeric_limits<double>::infinity();

  auto axis_samples = [](double lo, double hi, int res) {
    std::vector<double> v(res);
    for (int i = 0; i < res; ++i) v[i] = res == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (res - 1);
    return v;
  };

  // Enumerate the sample grid over Gamma: x-grid x y-grid x z-grid.
  std::vector<Vec> xs, ys;
  {
    std::vector<std::vector<double>> per_axis_x(n), per_axis_y(n);
    for (int i = 0; i < n; ++i) {
      per_axis_x[i] = axis_samples(gf.domain().x_lo[i], gf.domain().x_hi[i], grid.x_res);
      per_axis_y[i] = axis_samples(gf.domain().y_lo[i], gf.domain().y_hi[i], grid.y_res);
    }
    std::vector<int> idx(n, 0);
    for (;;) {
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = per_axis_x[i][idx[i]];
      xs.push_back(x);
      int a = 0;
      while (a < n && ++idx[a] == grid.x_res) idx[a++] = 0;
      if (a == n) break;
    }
    std::fill(idx.begin(), idx.end(), 0);
    for (;;) {
      Vec y(n);
      for (int i = 0; i < n; ++i) y[i] = per_axis_y[i][idx[i]];
      ys.push_back(y);
      int a = 0;
      while (a < n && ++idx[a] == grid.y_res) idx[a++] = 0;
      if (a == n) break;
    }
  }

  std::vector<FiberPoint> interior_points;
  for (const Vec& x : xs)
    for (const Vec& y : ys) {
      auto [zl, zh] = gf.domain().z_interval(x, y);
      if (!(zl < zh)) {
        report.a0_ok = false;  // empty fiber: A0 fails
        continue;
      }
      for (int k = 0; k < grid.z_res; ++k) {
        double z = zl + (zh - zl) * (k + 0.5) / grid.z_res;
        ++report.samples;
        double gz = gf.dz(x, y, z);
        if (gz > report.worst_gz) {
          report.worst_gz = gz;
          report.worst_gz_point = {x, y, z};
        }
        double det = std::abs(assemble_E(gf, x, y, z).determinant());
        if (det < report.min_abs_detE) {
          report.min_abs_detE = det;
          report.worst_detE_point = {x, y, z};
        }
        interior_points.push_back({x, y, z});
      }
    }

  if (report.worst_gz >= 0.0) report.a2_ok = false;
  if (report.min_abs_detE <= report.det_floor) report.a2_ok = false;

  // A1: statistical only. Map sampled fiber points to (x, u, p) and hunt for
  // multiple Newton basins; one finite scan can never prove injectivity.
  std::mt19937_64 rng(grid.seed);
  std::uniform_int_distribution<std::size_t> pick(0, interior_points.empty()
                                                         ? 0
                                                         : interior_points.size() - 1);
  int probes = std::min<int>(grid.a1_points, static_cast<int>(interior_points.size()));
  for (int t = 0; t < probes; ++t) {
    const FiberPoint& fp = interior_points[pick(rng)];
    double u = gf.eval(fp.x, fp.y, fp.z);
    Vec p = gf.grad_x(fp.x, fp.y, fp.z);
    ++report.a1_probes;
    auto solutions = solve_YZ_multistart(gf, fp.x, u, p, grid.a1_seeds, rng());
    if (solutions.empty()) {
      ++report.a1_failures;
      continue;
    }
    if (solutions.size() > 1) {
      report.a1_ok = false;
      A1Detection det;
      det.x = fp.x;
      det.u = u;
      det.p = p;
      det.y_a = solutions[0].y;
      det.z_a = solutions[0].z;
      det.y_b = solutions[1].y;
      det.z_b = solutions[1].z;
      report.a1_detections.push_back(std::move(det));
    }
  }
  return report;
}

}  // namespace gje
