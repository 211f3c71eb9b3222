#pragma once

#include <optional>
#include <vector>

#include "gje/genfun.hpp"
#include "gje/polygon.hpp"

namespace gje {

struct SegmentSample {
  double theta = 0.0;
  Vec x;
  Vec xdot;      // d x_theta / d theta
  double residual = 0.0;
};

/// A g-segment with respect to (y0, z0): the curve along which g_y/g_z
/// interpolates linearly between its endpoint values.
struct GSegment {
  Vec y0;
  double z0 = 0.0;
  Vec q0, q1;  // endpoint values of g_y/g_z
  double theta_min = 0.0, theta_max = 1.0;
  std::vector<SegmentSample> samples;

  double theta_step() const {
    return (theta_max - theta_min) / (static_cast<int>(samples.size()) - 1);
  }
  /// d/dtheta of the interpolated right-hand side; the q of the velocity
  /// formula rescaled to this parameter interval.
  Vec q_rate() const { return Vec((q1 - q0) / (theta_max - theta_min)); }
  const SegmentSample& at(int k) const { return samples[k]; }
  /// Sample index of a given theta (must land on the grid within 1e-9).
  int index_of(double theta) const;
  double max_residual() const;
};

struct SegmentOptions {
  int resolution = 129;     // samples including both endpoints
  int max_step_halvings = 6;
  double theta_min = 0.0;
  double theta_max = 1.0;
  NewtonOptions newton;
};

/// Computes the g-segment joining x_start (theta_min) to x_end (theta_max)
/// by Newton continuation from the previous sample. Raises LeftDomain when
/// the curve exits the x-box (which is exactly failure of g-convexity of the
/// box for this (y0, z0)).
GSegment g_segment(const GeneratingFunction& gf, const Vec& x_start, const Vec& x_end,
                   const Vec& y0, double z0, const SegmentOptions& opts = {});

/// Velocity formula: xdot_i = g_z E^{m,i} q_m, i.e. g_z * E^{-T} q.
Vec segment_velocity(const GeneratingFunction& gf, const FiberPoint& p, const Vec& q);

struct GConvexityWitness {
  Vec x_start, x_end, y;
  double z;
  double theta;
  Vec x_exit;
};

struct GConvexityVerdict {
  bool pass = true;
  std::optional<GConvexityWitness> witness;
  long segments_checked = 0;
  long segment_failures = 0;  // segments whose solve did not converge
};

struct GConvexityOptions {
  int boundary_points = 12;   // endpoint samples around the region
  int segment_resolution = 33;
};

/// Samples endpoint pairs in the region and (y,z) products; FAIL with a
/// witness on the first g-segment that leaves the polygon.
GConvexityVerdict is_g_convex_set(const GeneratingFunction& gf, const Polygon& region,
                                  const std::vector<Vec>& y_set,
                                  const std::vector<double>& z_set,
                                  const GConvexityOptions& opts = {});

}  // namespace gje
