#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gje/height.hpp"
#include "test_util.hpp"

using namespace gje;
using gje::test::vec2;

namespace {

GridPotential quadratic_potential(double a = 1.0, int nodes = 65, double half = 1.0) {
  Vec ax = GridPotential::linspace(-half, half, nodes);
  return GridPotential::from_function(
      ax, ax, [a](const Vec& x) { return 0.5 * a * x.squaredNorm(); });
}

}  // namespace

TEST_CASE("bilinear quadratic: h'' = |xdot|^2 and rhs equals it exactly") {
  auto gf = builtin("bilinear");
  auto u = quadratic_potential();
  // Support at the origin: y0 = Du(0) = 0, z0 = 0.
  GSegment seg = g_segment(gf, vec2(-0.5, 0.0), vec2(0.5, 0.0), vec2(0, 0), 0.0);
  HeightTrace tr = height_trace(gf, u, seg, 0.0);
  CHECK(tr.K_lemma == doctest::Approx(0.0));
  CHECK(tr.contact_failures == 0);
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    const auto& s = tr.samples[k];
    if (!tr.interior(static_cast<int>(k))) continue;
    double speed2 = seg.samples[k].xdot.squaredNorm();
    CHECK(s.h_second == doctest::Approx(speed2).epsilon(1e-7));
    CHECK(s.rhs.total_conservative == doctest::Approx(speed2).epsilon(1e-5));
    CHECK(std::abs(s.rhs.term_dpa_mid) < 1e-8);
    CHECK(std::abs(s.rhs.term_au_mid) < 1e-8);
    CHECK(s.rhs.term_k == 0.0);
    // h(theta) = |x_theta|^2 / 2 along the segment through the origin.
    CHECK(s.h == doctest::Approx(0.5 * s.x.squaredNorm()).epsilon(1e-9));
  }
}

TEST_CASE("u identical to its own support: h and all terms vanish") {
  auto gf = builtin("bilinear");
  Vec y0 = vec2(0.3, -0.2);
  double z0 = 0.1;
  Vec ax = GridPotential::linspace(-1.0, 1.0, 33);
  auto u = GridPotential::from_function(
      ax, ax, [&](const Vec& x) { return x.dot(y0) - z0; });
  GSegment seg = g_segment(gf, vec2(-0.6, -0.1), vec2(0.7, 0.4), y0, z0);
  HeightTrace tr = height_trace(gf, u, seg, 0.0);
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    const auto& s = tr.samples[k];
    CHECK(std::abs(s.h) < 1e-11);
    if (!tr.interior(static_cast<int>(k))) continue;
    CHECK(std::abs(s.h_second) < 1e-7);
    CHECK(s.h_second >= s.rhs.total_conservative - 1e-6);  // 0 >= 0
  }
}

TEST_CASE("quad-cost fixture: FD h'' dominates the assembled right side") {
  auto gf = builtin("quad-cost");
  auto u = quadratic_potential();
  // Contact at x* = 0: y0 = x* + Du(x*) = 0, z0 = -|x*-y0|^2/2 - u = 0.
  GSegment seg = g_segment(gf, vec2(-0.45, 0.1), vec2(0.45, -0.1), vec2(0, 0), 0.0);
  HeightTrace tr = height_trace(gf, u, seg, 0.0);
  CHECK(tr.contact_failures == 0);
  CHECK(tr.K_lemma == doctest::Approx(0.0));
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    const auto& s = tr.samples[k];
    if (!tr.interior(static_cast<int>(k)) || !s.contact_ok) continue;
    CHECK(s.h_second >= s.rhs.total_conservative - 1e-4);
    // A is constant: both A-derivative terms vanish.
    CHECK(std::abs(s.rhs.term_dpa_min) < 1e-7);
    CHECK(std::abs(s.rhs.term_au_min) < 1e-7);
  }
}

TEST_CASE("sigma shifts h but leaves the h' trace unchanged") {
  auto gf = builtin("bilinear");
  auto u = quadratic_potential();
  GSegment seg = g_segment(gf, vec2(-0.5, 0.0), vec2(0.5, 0.0), vec2(0, 0), 0.0);
  HeightTrace t0 = height_trace(gf, u, seg, 0.0);
  HeightTrace ts = height_trace(gf, u, seg, 0.125);
  REQUIRE(t0.samples.size() == ts.samples.size());
  for (std::size_t k = 0; k < t0.samples.size(); ++k) {
    CHECK(ts.samples[k].h == doctest::Approx(t0.samples[k].h - 0.125).epsilon(1e-12));
    CHECK(ts.samples[k].h_prime == doctest::Approx(t0.samples[k].h_prime).epsilon(1e-12));
    CHECK(ts.samples[k].h_second == doctest::Approx(t0.samples[k].h_second).epsilon(1e-12));
  }
}

TEST_CASE("maximum principle: h_sigma peaks at the segment endpoints") {
  auto gf = builtin("quad-cost");
  auto u = quadratic_potential();
  GSegment seg = g_segment(gf, vec2(-0.4, 0.2), vec2(0.6, -0.1), vec2(0, 0), 0.0);
  HeightTrace tr = height_trace(gf, u, seg, 0.05);
  double end_max = std::max(tr.samples.front().h, tr.samples.back().h);
  for (const auto& s : tr.samples) CHECK(s.h <= end_max + 1e-9);
}

TEST_CASE("reduced inequality h'' >= -C|h'| on an A3w/A4w-passing fixture") {
  auto gf = builtin("quad-cost");
  auto u = quadratic_potential(2.0);
  GSegment seg = g_segment(gf, vec2(-0.5, 0.0), vec2(0.5, 0.3), vec2(0, 0), 0.0);
  HeightTrace tr = height_trace(gf, u, seg, 0.0);
  double max_grad_gap = 0.0, max_speed = 0.0;
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    const auto& s = tr.samples[k];
    Vec gap = u.gradient(s.x) - gf.grad_x(s.x, seg.y0, seg.z0);
    max_grad_gap = std::max(max_grad_gap, gap.norm());
    max_speed = std::max(max_speed, seg.samples[k].xdot.norm());
  }
  double c = tr.K_lemma * max_grad_gap * max_speed + 1e-6;
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    if (!tr.interior(static_cast<int>(k))) continue;
    const auto& s = tr.samples[k];
    CHECK(s.h_second >= -c * std::abs(s.h_prime) - 1e-6);
  }
}

TEST_CASE("check_diffseg_bounds: quadratic with K = 0") {
  int m = 129;
  Vec h(m);
  for (int k = 0; k < m; ++k) {
    double t = -1.0 + 2.0 * k / (m - 1);
    h[k] = t * t;
  }
  DiffsegBounds b = check_diffseg_bounds(h, -1.0, 1.0, 0.0, 0.0);
  CHECK(std::abs(b.value) < 1e-10);
  CHECK(b.contains());
  CHECK(b.c1 == doctest::Approx(2.0 / 1.0));  // 2 / (b - t)
}

TEST_CASE("check_diffseg_bounds: exponential fixtures carry slack, sandwich holds") {
  int m = 129;
  for (double K : {1.0, 2.0}) {
    Vec h(m);
    for (int k = 0; k < m; ++k) {
      double t = -1.0 + 2.0 * k / (m - 1);
      h[k] = std::exp(-K * t);
    }
    for (double t : {-0.5, 0.0, 0.6}) {
      DiffsegBounds b = check_diffseg_bounds(h, -1.0, 1.0, K, t);
      CHECK(b.contains());
      // h' = -K e^{-Kt} < 0: the negative side of the sandwich is active.
      CHECK(b.value < 0.0);
    }
  }
}

TEST_CASE("check_diffseg_bounds: decreasing-then-flat fixture takes the h'(a) <= 0 branch") {
  int m = 129;
  double t0 = 0.2;
  Vec h(m);
  for (int k = 0; k < m; ++k) {
    double t = -1.0 + 2.0 * k / (m - 1);
    double w = std::max(0.0, t0 - t);
    h[k] = w * w * w * w * w;  // C^4, decreasing then identically flat
  }
  // h' <= 0 everywhere with h'(tau) = 0 on the flat stretch. The 5th
  // derivative jumps at t0, so the stencil check gets a loosened tolerance.
  DiffsegBounds b = check_diffseg_bounds(h, -1.0, 1.0, 0.0, -0.3, 1e-5);
  CHECK(b.value <= 0.0);
  CHECK(b.contains());
  DiffsegBounds flat = check_diffseg_bounds(h, -1.0, 1.0, 0.0, 0.6, 1e-5);
  CHECK(std::abs(flat.value) < 1e-12);
}

TEST_CASE("check_diffseg_bounds raises HypothesisFails when h'' < -K|h'|") {
  int m = 65;
  Vec h(m);
  for (int k = 0; k < m; ++k) {
    double t = -1.0 + 2.0 * k / (m - 1);
    h[k] = -t * t;  // h'' = -2, h'(0) = 0
  }
  CHECK_THROWS_AS(check_diffseg_bounds(h, -1.0, 1.0, 0.5, 0.1), HypothesisFails);
}

TEST_CASE("FD derivative helpers are exact on quartics") {
  int m = 33;
  double step = 2.0 / (m - 1);
  Vec f(m);
  for (int k = 0; k < m; ++k) {
    double t = -1.0 + k * step;
    f[k] = t * t * t * t;
  }
  Vec d1 = fd_first_uniform(f, step);
  Vec d2 = fd_second_uniform(f, step);
  for (int k = 2; k + 2 < m; ++k) {
    double t = -1.0 + k * step;
    CHECK(d1[k] == doctest::Approx(4.0 * t * t * t).epsilon(1e-10).scale(1e-10));
    CHECK(d2[k] == doctest::Approx(12.0 * t * t).epsilon(1e-10).scale(1e-10));
  }
}
