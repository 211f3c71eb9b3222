#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gje/duality.hpp"
#include "test_util.hpp"

using namespace gje;
using gje::test::random_fiber_point;
using gje::test::vec2;

TEST_CASE("solve_YZ bilinear closed form: Y = p, Z = x.p - u") {
  auto gf = builtin("bilinear");
  Vec x = vec2(1, 1);  // box corner is admissible for x
  DomainBox wide = DomainBox::cube(2, -2.0, 2.0, -4.0, 4.0, -12.0, 12.0);
  gf = builtin("bilinear", {}, 2, wide);
  Vec p = vec2(2, 3);
  ContactState cs = solve_YZ(gf, x, 0.0, p);
  CHECK((cs.y - p).norm() < 1e-12);
  CHECK(std::abs(cs.z - 5.0) < 1e-12);
}

TEST_CASE("solve_YZ quad-cost closed form: Y = x + p") {
  auto gf = builtin("quad-cost");
  Vec x = vec2(0, 0), p = vec2(1, 0);
  ContactState cs = solve_YZ(gf, x, 0.0, p);
  CHECK((cs.y - vec2(1, 0)).norm() < 1e-10);
  CHECK(cs.z == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("solve_YZ log-cost: pinned fixture, residual < 1e-10") {
  auto gf = builtin("log-cost");
  // Contact with y* = (2.7, 2.8): p = -(x-y*)/|x-y*|^2, z = -log|x-y*| - u.
  Vec x = vec2(0.2, 0.3);
  Vec ystar = vec2(2.7, 2.8);
  Vec d = x - ystar;
  Vec p = Vec(-d / d.squaredNorm());
  double u = 0.2;
  double zstar = -0.5 * std::log(d.squaredNorm()) - u;
  ContactState cs = solve_YZ(gf, x, u, p);
  CHECK((cs.y - ystar).norm() < 1e-8);
  CHECK(std::abs(cs.z - zstar) < 1e-8);
  double res = std::abs(gf.eval(x, cs.y, cs.z) - u) + (gf.grad_x(x, cs.y, cs.z) - p).norm();
  CHECK(res < 1e-10);
}

TEST_CASE("contact roundtrip reproduces (u, p) within 10x newton tol") {
  std::mt19937_64 rng(21);
  for (const char* name : {"bilinear", "quad-cost", "log-cost", "perturbed-bilinear"}) {
    auto gf = builtin(name);
    for (int t = 0; t < 20; ++t) {
      FiberPoint fp = random_fiber_point(gf, rng, 0.15);
      double u = gf.eval(fp.x, fp.y, fp.z);
      Vec p = gf.grad_x(fp.x, fp.y, fp.z);
      ContactState cs = solve_YZ(gf, fp.x, u, p, FiberPoint{fp.x, fp.y, fp.z});
      CHECK(std::abs(gf.eval(cs.x, cs.y, cs.z) - u) < 10.0 * tol::newton);
      CHECK((gf.grad_x(cs.x, cs.y, cs.z) - p).norm() < 10.0 * tol::newton);
    }
  }
}

TEST_CASE("dual_g bilinear: g* = x.y - u") {
  auto gf = builtin("bilinear", {}, 2, DomainBox::cube(2, -2.0, 2.0, -4.0, 4.0, -12.0, 12.0));
  CHECK(dual_g(gf, vec2(1, 2), vec2(3, 4), 6.0) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("dual_g perturbed-bilinear hits the quadratic-formula branch") {
  auto gf = builtin("perturbed-bilinear", {0.1});
  // -z + 0.05 z^2 = -1 with the g_z < 0 branch (z < 10): z = 10 - sqrt(80).
  double z = dual_g(gf, vec2(0, 0), vec2(0, 0), -1.0);
  CHECK(z == doctest::Approx(10.0 - std::sqrt(80.0)).epsilon(1e-12));
  CHECK(z == doctest::Approx(1.0557280900008412).epsilon(1e-10));
}

TEST_CASE("involution: dual_g(x,y,g(x,y,z)) = z and the reverse, to 1e-10") {
  std::mt19937_64 rng(33);
  for (const char* name :
       {"bilinear", "quad-cost", "log-cost", "sqrt-cost", "perturbed-bilinear"}) {
    auto gf = builtin(name);
    for (int t = 0; t < 50; ++t) {
      FiberPoint fp = random_fiber_point(gf, rng, 0.1);
      double u = gf.eval(fp.x, fp.y, fp.z);
      CHECK(std::abs(dual_g(gf, fp.x, fp.y, u) - fp.z) < 1e-10);
      double z2 = dual_g(gf, fp.x, fp.y, u);
      CHECK(std::abs(gf.eval(fp.x, fp.y, z2) - u) < 1e-10);
    }
  }
}

TEST_CASE("involution holds on the generic root-finding path too") {
  std::mt19937_64 rng(34);
  auto gf = without_analytic(builtin("sqrt-cost"));  // strips the closed-form dual
  for (int t = 0; t < 25; ++t) {
    FiberPoint fp = random_fiber_point(gf, rng, 0.1);
    double u = gf.eval(fp.x, fp.y, fp.z);
    CHECK(std::abs(dual_g(gf, fp.x, fp.y, u) - fp.z) < 1e-10);
  }
}

TEST_CASE("dual_g is strictly decreasing in u") {
  std::mt19937_64 rng(35);
  for (const char* name : {"bilinear", "perturbed-bilinear"}) {
    auto gf = builtin(name);
    for (int t = 0; t < 20; ++t) {
      FiberPoint fp = random_fiber_point(gf, rng, 0.2);
      double u = gf.eval(fp.x, fp.y, fp.z);
      double du = 1e-3;
      CHECK(dual_g(gf, fp.x, fp.y, u + du) < dual_g(gf, fp.x, fp.y, u));
    }
  }
}

TEST_CASE("dual_g raises OutOfRange outside the achievable values") {
  DomainBox tight = DomainBox::cube(2, -1.0, 1.0, -1.0, 1.0, -0.1, 0.1);
  auto gf = builtin("bilinear", {}, 2, tight);
  CHECK_THROWS_AS(dual_g(gf, vec2(0, 0), vec2(0, 0), 5.0), OutOfRange);
}

TEST_CASE("solve_XU bilinear: X = q, U = q.y - z") {
  auto gf = builtin("bilinear", {}, 2, DomainBox::cube(2, -2.0, 2.0, -2.0, 2.0, -12.0, 12.0));
  Vec y = vec2(0.5, -0.25), q = vec2(0.3, 0.7);
  double z = 0.4;
  DualContactState ds = solve_XU(gf, y, z, q);
  CHECK((ds.x - q).norm() < 1e-9);
  CHECK(ds.u == doctest::Approx(q.dot(y) - z).epsilon(1e-9));
}

TEST_CASE("solve_XU quad-cost: pinned inverse fixture") {
  auto gf = builtin("quad-cost");
  // From the forward fixture x=(0,0), y=(1,0), z=-1/2: q = g*_y = x - y.
  Vec y = vec2(1, 0), q = vec2(-1, 0);
  DualContactState ds = solve_XU(gf, y, -0.5, q);
  CHECK((ds.x - vec2(0, 0)).norm() < 1e-8);
  CHECK(std::abs(ds.u) < 1e-8);
}

TEST_CASE("solve_XU inverts solve_YZ on random contact states") {
  std::mt19937_64 rng(55);
  for (const char* name : {"bilinear", "quad-cost", "log-cost"}) {
    auto gf = builtin(name);
    for (int t = 0; t < 10; ++t) {
      FiberPoint fp = random_fiber_point(gf, rng, 0.2);
      double u = gf.eval(fp.x, fp.y, fp.z);
      Vec q = dual_g_grad_y(gf, fp.x, fp.y, u);
      DualContactState ds = solve_XU(gf, fp.y, fp.z, q, fp.x);
      CHECK((ds.x - fp.x).norm() < 1e-8);
      CHECK(std::abs(ds.u - u) < 1e-8);
    }
  }
}

TEST_CASE("g*-transform: Legendre self-duality of |x|^2/2 under bilinear") {
  auto gf = builtin("bilinear");
  Vec ax = GridPotential::linspace(-1.0, 1.0, 65);
  auto u = GridPotential::from_function(ax, ax, [](const Vec& x) { return 0.5 * x.squaredNorm(); });
  Vec yax = GridPotential::linspace(-0.9, 0.9, 33);
  TransformResult tr = g_star_transform(gf, u, yax, yax);
  CHECK(tr.invalid_nodes == 0);
  double h = ax[1] - ax[0];
  double worst = 0.0;
  for (int i = 0; i < tr.n0(); ++i)
    for (int j = 0; j < tr.n1(); ++j) {
      double y2 = yax[i] * yax[i] + yax[j] * yax[j];
      worst = std::max(worst, std::abs(tr.values(i, j) - 0.5 * y2));
    }
  CHECK(worst <= h * h);
}

TEST_CASE("g*-transform of a g-affine potential: point value with full-grid argmax") {
  auto gf = builtin("bilinear");
  Vec y0 = vec2(0.25, -0.5);
  double z0 = 0.125;
  Vec ax = GridPotential::linspace(-1.0, 1.0, 17);
  auto u = GridPotential::from_function(
      ax, ax, [&](const Vec& x) { return x.dot(y0) - z0; });
  Vec yax0(1), yax1(1);
  // Single-node target grid exactly at y0 (transform accepts any axes >= 1).
  yax0[0] = y0[0];
  yax1[0] = y0[1];
  TransformResult tr = g_star_transform(gf, u, yax0, yax1);
  CHECK(tr.values(0, 0) == doctest::Approx(z0).epsilon(1e-12));
  CHECK(tr.argmax[0].size() == static_cast<std::size_t>(17 * 17));
}

TEST_CASE("double transform returns a g-convex potential up to grid tolerance") {
  auto gf = builtin("bilinear");
  Vec ax = GridPotential::linspace(-1.0, 1.0, 65);
  auto u = GridPotential::from_function(ax, ax, [](const Vec& x) { return 0.5 * x.squaredNorm(); });
  Vec yax = GridPotential::linspace(-1.0, 1.0, 65);
  TransformResult v = g_star_transform(gf, u, yax, yax);
  REQUIRE(v.invalid_nodes == 0);
  TransformResult u2 = g_transform(gf, v.potential(), ax, ax);
  REQUIRE(u2.invalid_nodes == 0);
  double hy = yax[1] - yax[0];
  double worst = 0.0;
  for (int i = 0; i < 65; ++i)
    for (int j = 0; j < 65; ++j)
      worst = std::max(worst, std::abs(u2.values(i, j) - u.values()(i, j)));
  CHECK(worst <= hy * hy);
}

TEST_CASE("support order-reversal under the g*-transform") {
  auto gf = builtin("bilinear");
  Vec ax = GridPotential::linspace(-1.0, 1.0, 33);
  auto u = GridPotential::from_function(ax, ax, [](const Vec& x) { return 0.5 * x.squaredNorm(); });
  // Support at x0: y0 = Du(x0), z0 = x0.y0 - u(x0); u >= support with equality at x0.
  Vec x0 = vec2(0.25, -0.25);
  Vec y0 = x0;
  double u0 = 0.5 * x0.squaredNorm();
  double star0 = dual_g(gf, x0, y0, u0);
  for (int i = 0; i < 33; ++i)
    for (int j = 0; j < 33; ++j) {
      Vec x = vec2(ax[i], ax[j]);
      double ux = 0.5 * x.squaredNorm();
      CHECK(dual_g(gf, x, y0, ux) <= star0 + 1e-12);
    }
}

TEST_CASE("transform counts inadmissible nodes instead of failing") {
  DomainBox tight = DomainBox::cube(2, -1.0, 1.0, -1.0, 1.0, -0.2, 0.2);
  auto gf = builtin("bilinear", {}, 2, tight);
  Vec ax = GridPotential::linspace(-1.0, 1.0, 9);
  // u = 3 puts z = x.y - 3 below the fiber for every grid point.
  auto u = GridPotential::from_function(ax, ax, [](const Vec&) { return 3.0; });
  TransformResult tr = g_star_transform(gf, u, ax, ax);
  CHECK(tr.invalid_nodes == 9 * 9);
  CHECK(tr.skipped_points == 9L * 9 * 9 * 9);
  CHECK_THROWS_AS(tr.potential(), Error);
}

TEST_CASE("dual function object: involution and analytic derivatives") {
  std::mt19937_64 rng(77);
  for (const char* name : {"bilinear", "quad-cost", "log-cost"}) {
    auto gf = builtin(name);
    auto dual = dual_function_object(gf);
    CHECK(dual.has_analytic_derivatives());
    for (int t = 0; t < 10; ++t) {
      FiberPoint fp = random_fiber_point(gf, rng, 0.15);
      double u = gf.eval(fp.x, fp.y, fp.z);
      // ghat(y, x, u) = g*(x, y, u) = z.
      CHECK(dual.eval(fp.y, fp.x, u) == doctest::Approx(fp.z).epsilon(1e-10));
      // ghat_z = 1/g_z = -1 for phi(z) = -z families.
      CHECK(dual.dz(fp.y, fp.x, u) == doctest::Approx(-1.0).epsilon(1e-12));
      // Dual-of-dual closed form recovers g itself.
      CHECK(dual.dual_z()(fp.y, fp.x, fp.z) == doctest::Approx(u).epsilon(1e-12));
    }
    // Spot-check an analytic dual partial against the FD oracle.
    FiberPoint fp = random_fiber_point(gf, rng, 0.25);
    double u = gf.eval(fp.x, fp.y, fp.z);
    PartialSpec spec = PartialSpec(2).dx(0).dy(1);
    double got = dual.partial(fp.y, fp.x, u, spec);
    double want = gje::test::oracle_partial(dual, fp.y, fp.x, u, spec, 1e-5);
    CHECK(got == doctest::Approx(want).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("multistart finds a single basin on bilinear") {
  auto gf = builtin("bilinear");
  Vec x = vec2(0.2, 0.1), p = vec2(0.4, -0.3);
  auto sols = solve_YZ_multistart(gf, x, 0.05, p, 8, 99);
  REQUIRE(sols.size() == 1);
  CHECK((sols[0].y - p).norm() < 1e-10);
}
