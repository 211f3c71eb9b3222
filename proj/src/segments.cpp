#include "gje/segments.hpp"

#include <cmath>

namespace gje {

namespace {

// g_y/g_z at (x, y0, z0).
Vec slope_field(const GeneratingFunction& gf, const Vec& x, const Vec& y0, double z0) {
  return Vec(gf.grad_y(x, y0, z0) / gf.dz(x, y0, z0));
}

// Solve g_y/g_z(x, y0, z0) = target for x by damped Newton from x_seed.
// The Jacobian of the slope field is E^T / g_z.
Vec solve_slope(const GeneratingFunction& gf, const Vec& x_seed, const Vec& y0, double z0,
                const Vec& target, const NewtonOptions& opts, double* residual_out) {
  Vec x = x_seed;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    Vec r = slope_field(gf, x, y0, z0) - target;
    double rn = r.norm();
    if (rn < opts.tolerance) {
      if (residual_out) *residual_out = rn;
      return x;
    }
    double gz = gf.dz(x, y0, z0);
    Mat jac = assemble_E(gf, x, y0, z0).transpose() / gz;
    Vec step = jac.fullPivLu().solve(-r);
    double scale = 1.0;
    int damping = 0;
    while (damping <= opts.max_damping) {
      Vec x2 = x + scale * step;
      if (gf.domain().contains_x(x2)) {
        x = x2;
        break;
      }
      scale *= 0.5;
      ++damping;
    }
    if (damping > opts.max_damping)
      throw LeftDomain("g_segment: iterate exits the x-box");
  }
  throw NoConvergence("g_segment: slope equation did not converge");
}

}  // namespace

int GSegment::index_of(double theta) const {
  double k = (theta - theta_min) / theta_step();
  int i = static_cast<int>(std::llround(k));
  if (i < 0 || i >= static_cast<int>(samples.size()) || std::abs(k - i) > 1e-9)
    throw Error("GSegment::index_of: theta not on the sample grid");
  return i;
}

double GSegment::max_residual() const {
  double worst = 0.0;
  for (const auto& s : samples) worst = std::max(worst, s.residual);
  return worst;
}

Vec segment_velocity(const GeneratingFunction& gf, const FiberPoint& p, const Vec& q) {
  Mat e = assemble_E(gf, p.x, p.y, p.z);
  if (std::abs(e.determinant()) <= tol::det_e_floor)
    throw Error("segment_velocity: E is singular");
  double gz = gf.dz(p.x, p.y, p.z);
  return Vec(gz * e.transpose().fullPivLu().solve(q));
}

GSegment g_segment(const GeneratingFunction& gf, const Vec& x_start, const Vec& x_end,
                   const Vec& y0, double z0, const SegmentOptions& opts) {
  if (!gf.domain().contains_x(x_start) || !gf.domain().contains_x(x_end))
    throw LeftDomain("g_segment: endpoints outside the x-box");

  GSegment seg;
  seg.y0 = y0;
  seg.z0 = z0;
  seg.theta_min = opts.theta_min;
  seg.theta_max = opts.theta_max;
  seg.q0 = slope_field(gf, x_start, y0, z0);
  seg.q1 = slope_field(gf, x_end, y0, z0);
  seg.samples.resize(opts.resolution);

  const int m = opts.resolution;
  const double span = opts.theta_max - opts.theta_min;
  const Vec q_rate = seg.q_rate();

  Vec x = x_start;
  for (int k = 0; k < m; ++k) {
    double theta = opts.theta_min + span * k / (m - 1);
    double s = static_cast<double>(k) / (m - 1);  // normalized position
    Vec target = Vec(s * seg.q1 + (1.0 - s) * seg.q0);

    double residual = 0.0;
    if (k == 0) {
      x = x_start;
      residual = (slope_field(gf, x, y0, z0) - target).norm();
    } else if (k == m - 1) {
      // Solve anyway to verify the endpoint satisfies the equation; the
      // continuation should land on x_end.
      x = solve_slope(gf, x, y0, z0, target, opts.newton, &residual);
    } else {
      // Continuation with step halving: retry from intermediate targets when
      // the full step fails (segments can curve sharply near the boundary).
      int halvings = 0;
      Vec reached = slope_field(gf, x, y0, z0);
      for (;;) {
        try {
          int pieces = 1 << halvings;
          Vec xl = x;
          for (int piece = 1; piece <= pieces; ++piece) {
            Vec inter = Vec(reached + (target - reached) * piece / pieces);
            xl = solve_slope(gf, xl, y0, z0, inter, opts.newton, &residual);
          }
          x = xl;
          break;
        } catch (const NoConvergence&) {
          if (++halvings > opts.max_step_halvings) throw;
        }
      }
    }

    SegmentSample& sample = seg.samples[k];
    sample.theta = theta;
    sample.x = x;
    sample.residual = residual;
    sample.xdot = segment_velocity(gf, {x, y0, z0}, q_rate);
  }
  return seg;
}

GConvexityVerdict is_g_convex_set(const GeneratingFunction& gf, const Polygon& region,
                                  const std::vector<Vec>& y_set,
                                  const std::vector<double>& z_set,
                                  const GConvexityOptions& opts) {
  GConvexityVerdict verdict;

  // Endpoint candidates: polygon vertices pulled slightly inward plus points
  // along the boundary edges.
  std::vector<Vec> points;
  auto [lo, hi] = region.bounding_box();
  Vec center = 0.5 * (lo + hi);
  const std::size_t nv = region.vertices.size();
  auto keep = [&](const Vec& p) {
    // The inward nudge aims at the bounding-box center, which can land
    // outside near reflex corners; such candidates are dropped.
    if (region.contains(p) && gf.domain().contains_x(p)) points.push_back(p);
  };
  for (std::size_t i = 0; i < nv; ++i) {
    Vec v = region.vertices[i];
    keep(Vec(v + 1e-3 * (center - v)));
  }
  for (int k = 0; k < opts.boundary_points; ++k) {
    double t = static_cast<double>(k) / opts.boundary_points;
    double arc = t * nv;
    std::size_t edge = std::min<std::size_t>(static_cast<std::size_t>(arc), nv - 1);
    double s = arc - edge;
    Vec a = region.vertices[edge];
    Vec b = region.vertices[(edge + 1) % nv];
    Vec p = Vec(a + s * (b - a));
    keep(Vec(p + 1e-3 * (center - p)));
  }

  SegmentOptions seg_opts;
  seg_opts.resolution = opts.segment_resolution;

  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      for (const Vec& y : y_set)
        for (double z : z_set) {
          ++verdict.segments_checked;
          GSegment seg;
          try {
            seg = g_segment(gf, points[i], points[j], y, z, seg_opts);
          } catch (const Error&) {
            ++verdict.segment_failures;
            continue;
          }
          for (const auto& s : seg.samples) {
            if (!region.contains(s.x)) {
              verdict.pass = false;
              verdict.witness = GConvexityWitness{points[i], points[j], y, z, s.theta, s.x};
              return verdict;
            }
          }
        }
  return verdict;
}

}  // namespace gje
