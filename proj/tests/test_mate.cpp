#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "gje/grid.hpp"
#include "gje/mate.hpp"
#include "test_util.hpp"

using namespace gje;
using gje::test::random_fiber_point;
using gje::test::vec2;

TEST_CASE("matrix_E identities for the model families") {
  std::mt19937_64 rng(2);
  for (const char* name : {"bilinear", "quad-cost", "perturbed-bilinear"}) {
    auto gf = builtin(name);
    FiberPoint p = random_fiber_point(gf, rng);
    Mat e = matrix_E(gf, p);
    // The z-perturbation never touches g_xz, so E stays the identity.
    CHECK((e - Mat::Identity(2, 2)).norm() < 1e-12);
  }
}

TEST_CASE("matrix_E raises below the determinant floor") {
  // A degenerate custom function: g = x1 y1 - z has rank-1 E in 2D.
  DomainBox box = DomainBox::cube(2, -1.0, 1.0, -1.0, 1.0, -2.0, 2.0);
  GeneratingFunction gf(
      2, box, [](const Vec& x, const Vec& y, double z) { return x[0] * y[0] - z; });
  FiberPoint p{vec2(0.1, 0.2), vec2(0.3, 0.4), 0.0};
  CHECK_THROWS_AS(matrix_E(gf, p), Error);
}

TEST_CASE("coeff_A closed forms: 0 for bilinear, -I for quad-cost") {
  std::mt19937_64 rng(4);
  auto gfb = builtin("bilinear");
  auto gfq = builtin("quad-cost");
  for (int t = 0; t < 5; ++t) {
    FiberPoint p = random_fiber_point(gfb, rng, 0.2);
    double u = gfb.eval(p.x, p.y, p.z);
    Vec grad = gfb.grad_x(p.x, p.y, p.z);
    CHECK(coeff_A(gfb, p.x, u, grad).norm() < 1e-10);

    FiberPoint q = random_fiber_point(gfq, rng, 0.3);
    double uq = gfq.eval(q.x, q.y, q.z);
    Vec gq = gfq.grad_x(q.x, q.y, q.z);
    CHECK((coeff_A(gfq, q.x, uq, gq) + Mat::Identity(2, 2)).norm() < 1e-9);
  }
}

TEST_CASE("coeff_A log-cost at the pinned contact fixture") {
  auto gf = builtin("log-cost");
  Vec x = vec2(0.2, 0.3), ystar = vec2(2.7, 2.8);
  Vec d = x - ystar;
  Vec p = Vec(-d / d.squaredNorm());
  double u = 0.2;
  Mat a = coeff_A(gf, x, u, p);
  // Closed form: A = g_xx(x, y*, z*) = -I/s + 2 d d^T / s^2.
  double s = d.squaredNorm();
  Mat expect = -Mat::Identity(2, 2) / s + 2.0 * (d * d.transpose()) / (s * s);
  CHECK((a - expect).norm() < 1e-8);
  CHECK((a - a.transpose()).norm() < 1e-12);  // symmetrized
}

TEST_CASE("DY identity: bilinear and quad-cost closed forms") {
  auto gfb = builtin("bilinear");
  Vec x = vec2(0.2, -0.1);
  DYResult r1 = DY_from_hessian(gfb, x, 0.05, vec2(0.3, 0.4), Mat::Identity(2, 2));
  CHECK((r1.DY - Mat::Identity(2, 2)).norm() < 1e-10);
  CHECK(r1.det == doctest::Approx(1.0).epsilon(1e-10));

  auto gfq = builtin("quad-cost");
  DYResult r2 = DY_from_hessian(gfq, x, 0.0, vec2(0.1, 0.2), Mat::Zero(2, 2));
  // A = -I, E = I: DY = 0 - (-I) = I; the zero potential transports by a shift.
  CHECK((r2.DY - Mat::Identity(2, 2)).norm() < 1e-9);
  CHECK(r2.det == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("det DY equals det(E^-1) det(D^2u - A) to 1e-10") {
  std::mt19937_64 rng(8);
  auto gf = builtin("log-cost");
  for (int t = 0; t < 6; ++t) {
    FiberPoint p = random_fiber_point(gf, rng, 0.25);
    double u = gf.eval(p.x, p.y, p.z);
    Vec grad = gf.grad_x(p.x, p.y, p.z);
    Mat hess = Mat::Identity(2, 2) * (1.2 + 0.1 * t);
    DYResult r = DY_from_hessian(gf, p.x, u, grad, hess);
    double split = r.coeffs.E_inv.determinant() * (hess - r.coeffs.A).determinant();
    CHECK(r.det == doctest::Approx(split).epsilon(1e-10));
  }
}

TEST_CASE("FD Jacobian of x -> Y(x, u(x), Du(x)) matches E^-1(D^2u - A)") {
  // Quadratic potential on a grid; quad-cost so that Y = x + Du is nontrivial.
  auto gf = builtin("quad-cost", {}, 2, DomainBox::cube(2, -1.0, 1.0, -2.4, 2.4, -12.0, 12.0));
  Vec ax = GridPotential::linspace(-1.0, 1.0, 65);
  Mat q(2, 2);
  q << 1.4, 0.2, 0.2, 0.8;
  auto u = GridPotential::from_function(
      ax, ax, [&](const Vec& x) { return 0.5 * x.dot(q * x); });

  Vec x = vec2(0.2, -0.3);
  double uval;
  Vec du;
  Mat d2u;
  u.eval_all(x, &uval, &du, &d2u);
  DYResult identity = DY_from_hessian(gf, x, uval, du, d2u);

  const double h = u.step0();
  Mat fd(2, 2);
  for (int j = 0; j < 2; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    double up, um;
    Vec dup, dum;
    u.eval_all(xp, &up, &dup, nullptr);
    u.eval_all(xm, &um, &dum, nullptr);
    ContactState cp = solve_YZ(gf, xp, up, dup);
    ContactState cm = solve_YZ(gf, xm, um, dum);
    fd.col(j) = (cp.y - cm.y) / (2.0 * h);
  }
  double rel = (fd - identity.DY).cwiseAbs().maxCoeff() / identity.DY.cwiseAbs().maxCoeff();
  CHECK(rel < 1e-3);
}

TEST_CASE("check_E_is_DpY below 1e-5 on the built-in families") {
  std::mt19937_64 rng(16);
  for (const char* name : {"bilinear", "quad-cost", "log-cost", "sqrt-cost"}) {
    auto gf = builtin(name);
    for (int t = 0; t < 5; ++t) {
      FiberPoint p = random_fiber_point(gf, rng, 0.25);
      double u = gf.eval(p.x, p.y, p.z);
      Vec grad = gf.grad_x(p.x, p.y, p.z);
      CHECK(check_E_is_DpY(gf, p.x, u, grad) < 1e-5);
    }
  }
}

TEST_CASE("ellipticity bookkeeping: D^2u - A >= 0 for a g-convex grid potential") {
  auto gf = builtin("quad-cost");
  Vec ax = GridPotential::linspace(-0.8, 0.8, 33);
  auto u = GridPotential::from_function(
      ax, ax, [](const Vec& x) { return 0.25 * x.squaredNorm(); });
  for (int i = 4; i < 29; i += 8)
    for (int j = 4; j < 29; j += 8) {
      Vec x = u.node_point(i, j);
      double uval;
      Vec du;
      Mat d2u;
      u.eval_all(x, &uval, &du, &d2u);
      DYResult r = DY_from_hessian(gf, x, uval, du, d2u);
      Mat m = d2u - r.coeffs.A;
      Eigen::SelfAdjointEigenSolver<Mat> eig(m);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
    }
}

TEST_CASE("mate_coefficients: B carries det E times psi") {
  auto gf = builtin("bilinear");
  Vec x = vec2(0.1, 0.1);
  PsiFn psi = [](const Vec&, double, const Vec&) { return 3.0; };
  MateCoefficients mc = mate_coefficients(gf, x, 0.0, vec2(0.2, 0.2), psi);
  CHECK(mc.detE == doctest::Approx(1.0));
  CHECK(mc.B == doctest::Approx(3.0));
  CHECK((mc.E * mc.E_inv - Mat::Identity(2, 2)).norm() < 1e-10);
}
