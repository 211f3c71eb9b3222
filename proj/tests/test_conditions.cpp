#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gje/conditions.hpp"
#include "test_util.hpp"

using namespace gje;
using gje::test::random_fiber_point;
using gje::test::vec2;

namespace {

// Closed-form oracle for the log-cost family. With g = -log|x-y| - z the
// contact map gives d = x - y = -p/|p|^2, hence
//   A(p) = c_xx(x, Y(x,p)) = -|p|^2 I + 2 p p^T,
// which is quadratic in p, so D_{p_k p_l} A_ij is the constant tensor
//   -2 d_kl d_ij + 2 (d_ik d_jl + d_jk d_il).
double oracle_log_dp2A(const Vec& xi_i, const Vec& xi_j, const Vec& eta_k, const Vec& eta_l) {
  return -2.0 * eta_k.dot(eta_l) * xi_i.dot(xi_j) +
         2.0 * (xi_i.dot(eta_k) * xi_j.dot(eta_l) + xi_j.dot(eta_k) * xi_i.dot(eta_l));
}

}  // namespace

TEST_CASE("a3w_form vanishes identically for constant-A families") {
  std::mt19937_64 rng(1);
  for (const char* name : {"bilinear", "quad-cost"}) {
    auto gf = builtin(name);
    for (int t = 0; t < 6; ++t) {
      FiberPoint fp = random_fiber_point(gf, rng, 0.2);
      double u = gf.eval(fp.x, fp.y, fp.z);
      Vec p = gf.grad_x(fp.x, fp.y, fp.z);
      Vec xi = vec2(std::cos(0.3 + t), std::sin(0.3 + t));
      Vec eta = vec2(-std::sin(0.3 + t), std::cos(0.3 + t));
      CHECK(std::abs(a3w_form(gf, fp.x, u, p, xi, eta)) < 1e-6);
      CHECK(std::abs(a4w_form(gf, fp.x, u, p, xi)) < 1e-6);
    }
  }
}

TEST_CASE("a3w_form projects eta off xi before contracting") {
  auto gf = builtin("bilinear");
  Vec x = vec2(0.1, 0.2), xi = vec2(1, 0);
  double u = gf.eval(x, vec2(0.3, 0.1), 0.0);
  Vec p = gf.grad_x(x, vec2(0.3, 0.1), 0.0);
  // Parallel eta projects to zero: the form is defined to be 0 there.
  CHECK(a3w_form(gf, x, u, p, xi, Vec(2.0 * xi)) == 0.0);
}

TEST_CASE("log-cost A3w form matches the closed-form tensor: exactly -2 on orthogonal pairs") {
  // The sign is a computed result, pinned as a fixture. A(p) is quadratic in
  // p for this family and the orthogonal-pair contraction is exactly -2:
  // the family fails A3w under this convention.
  auto gf = builtin("log-cost");
  std::mt19937_64 rng(9);
  for (int t = 0; t < 5; ++t) {
    FiberPoint fp = random_fiber_point(gf, rng, 0.25);
    double u = gf.eval(fp.x, fp.y, fp.z);
    Vec p = gf.grad_x(fp.x, fp.y, fp.z);
    double angle = 0.17 + 0.9 * t;
    Vec xi = vec2(std::cos(angle), std::sin(angle));
    Vec eta = vec2(-std::sin(angle), std::cos(angle));
    double v = a3w_form(gf, fp.x, u, p, xi, eta);
    CHECK(v == doctest::Approx(-2.0).epsilon(1e-5));
    CHECK(v == doctest::Approx(oracle_log_dp2A(xi, xi, eta, eta)).epsilon(1e-5));
  }
}

TEST_CASE("log-cost D_p^2 A against the closed-form oracle on random 4-tuples") {
  auto gf = builtin("log-cost");
  std::mt19937_64 rng(10);
  FiberPoint fp = random_fiber_point(gf, rng, 0.25);
  double u = gf.eval(fp.x, fp.y, fp.z);
  Vec p = gf.grad_x(fp.x, fp.y, fp.z);
  APTensor t = dp2_A(gf, fp.x, u, p);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  for (int k = 0; k < 12; ++k) {
    Vec a = vec2(std::cos(angle(rng)), std::sin(angle(rng)));
    Vec c = vec2(std::cos(angle(rng)), std::sin(angle(rng)));
    double got = 0.0;
    for (int kk = 0; kk < 2; ++kk)
      for (int ll = 0; ll < 2; ++ll) got += c[kk] * c[ll] * a.dot(t[kk][ll] * a);
    CHECK(got == doctest::Approx(oracle_log_dp2A(a, a, c, c)).epsilon(1e-4).scale(1e-4));
  }
}

TEST_CASE("a3w_form is even in each argument") {
  auto gf = builtin("log-cost");
  std::mt19937_64 rng(13);
  for (int t = 0; t < 4; ++t) {
    FiberPoint fp = random_fiber_point(gf, rng, 0.25);
    double u = gf.eval(fp.x, fp.y, fp.z);
    Vec p = gf.grad_x(fp.x, fp.y, fp.z);
    Vec xi = gje::test::vec2(std::cos(1.1 * t), std::sin(1.1 * t));
    Vec eta = vec2(-xi[1], xi[0]);
    double base = a3w_form_raw(gf, fp.x, u, p, xi, eta);
    CHECK(a3w_form_raw(gf, fp.x, u, p, Vec(-xi), eta) ==
          doctest::Approx(base).epsilon(1e-8).scale(1.0));
    CHECK(a3w_form_raw(gf, fp.x, u, p, xi, Vec(-eta)) ==
          doctest::Approx(base).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("raw form scales quartically: (2xi, 3eta) = 36 x") {
  auto gf = builtin("log-cost");
  std::mt19937_64 rng(17);
  FiberPoint fp = random_fiber_point(gf, rng, 0.25);
  double u = gf.eval(fp.x, fp.y, fp.z);
  Vec p = gf.grad_x(fp.x, fp.y, fp.z);
  Vec xi = vec2(0.8, 0.6), eta = vec2(-0.6, 0.8);
  double base = a3w_form_raw(gf, fp.x, u, p, xi, eta);
  double scaled = a3w_form_raw(gf, fp.x, u, p, Vec(2.0 * xi), Vec(3.0 * eta));
  CHECK(scaled == doctest::Approx(36.0 * base).epsilon(1e-6).scale(1e-6));
}

TEST_CASE("relaxed inequality bookkeeping") {
  auto gf = builtin("quad-cost");
  Vec x = vec2(0.1, -0.2);
  FiberPoint fp{x, vec2(0.2, 0.1), 0.5};
  double u = gf.eval(fp.x, fp.y, fp.z);
  Vec p = gf.grad_x(fp.x, fp.y, fp.z);

  // Orthogonal pair: rhs = 0 and lhs = 0 for the constant-A family.
  auto [lhs1, rhs1] = a3w_relaxed_check(gf, x, u, p, vec2(1, 0), vec2(0, 1), 2.0);
  CHECK(std::abs(lhs1) < 1e-6);
  CHECK(rhs1 == doctest::Approx(0.0));

  // Parallel pair on bilinear: lhs = 0 >= rhs = -K.
  auto gfb = builtin("bilinear");
  double ub = gfb.eval(x, fp.y, fp.z);
  Vec pb = gfb.grad_x(x, fp.y, fp.z);
  auto [lhs2, rhs2] = a3w_relaxed_check(gfb, x, ub, pb, vec2(1, 0), vec2(1, 0), 3.0);
  CHECK(std::abs(lhs2) < 1e-6);
  CHECK(rhs2 == doctest::Approx(-3.0));
  CHECK(lhs2 >= rhs2);
}

TEST_CASE("log-cost scan reports the A3w failure with worst value -2") {
  auto gf = builtin("log-cost");
  ScanOptions opts;
  opts.x_res = 3;
  opts.y_res = 3;
  opts.z_res = 2;
  opts.random_pairs = 8;
  opts.k_tuples = 32;
  ConditionReport rep = scan_conditions(gf, opts);
  REQUIRE(rep.points > 0);
  // A3w fails for this family; the relaxed inequality is only claimed when
  // the scan passes, so no check of it here.
  CHECK_FALSE(rep.a3w_pass());
  CHECK(rep.worst_a3w == doctest::Approx(-2.0).epsilon(1e-4));
  CHECK(rep.a4w_pass());  // A is u-independent for every phi(z) = -z family
  CHECK(rep.k_est > 0.0);
  CHECK(rep.k_est < 6.0 + 1e-3);  // closed form caps |contraction| at 6
}

TEST_CASE("scan_conditions verdicts for constant-A families") {
  for (const char* name : {"bilinear", "quad-cost"}) {
    auto gf = builtin(name);
    ScanOptions opts;
    opts.x_res = 3;
    opts.y_res = 3;
    opts.z_res = 2;
    ConditionReport rep = scan_conditions(gf, opts);
    CHECK(rep.points > 0);
    CHECK(rep.skipped == 0);
    CHECK(std::abs(rep.worst_a3w) < 1e-6);
    CHECK(std::abs(rep.worst_a4w) < 1e-6);
    CHECK(rep.a3w_pass());
    CHECK(rep.a4w_pass());
  }
}

TEST_CASE("scan_conditions sqrt-cost fixture: pinned scan output") {
  auto gf = builtin("sqrt-cost");
  ScanOptions opts;
  opts.x_res = 3;
  opts.y_res = 3;
  opts.z_res = 2;
  ConditionReport rep = scan_conditions(gf, opts);
  CHECK(rep.points == 3 * 3 * 3 * 3 * 2);
  // The scan is its own oracle here; the verdicts below were produced by the
  // committed configuration and pin the report shape.
  CHECK(rep.a4w_pass());
  CHECK(std::isfinite(rep.worst_a3w));
  CHECK(rep.k_est > 0.0);
  // Witness re-evaluates to its recorded value.
  double again = a3w_form_raw(gf, rep.a3w_witness.x, rep.a3w_witness.u, rep.a3w_witness.p,
                              rep.a3w_witness.xi, rep.a3w_witness.eta);
  CHECK(again == doctest::Approx(rep.a3w_witness.value).epsilon(1e-8).scale(1e-8));
}

TEST_CASE("scan determinism: same seed, same report") {
  auto gf = builtin("sqrt-cost");
  ScanOptions opts;
  opts.x_res = 2;
  opts.y_res = 2;
  opts.z_res = 2;
  ConditionReport a = scan_conditions(gf, opts);
  ConditionReport b = scan_conditions(gf, opts);
  CHECK(a.worst_a3w == b.worst_a3w);
  CHECK(a.worst_a4w == b.worst_a4w);
  CHECK(a.k_est == b.k_est);
}

TEST_CASE("perturbed-bilinear a4w form at a pinned sample") {
  auto gf = builtin("perturbed-bilinear", {0.1});
  Vec x = vec2(0.2, -0.1);
  FiberPoint fp{x, vec2(0.3, 0.4), 0.5};
  double u = gf.eval(fp.x, fp.y, fp.z);
  Vec p = gf.grad_x(fp.x, fp.y, fp.z);
  // A = g_xx = 0 for every z (the perturbation is z-only), so D_u A = 0;
  // recorded as the fixture value.
  double v = a4w_form(gf, x, u, p, vec2(1, 0));
  CHECK(std::abs(v) < 1e-6);
}
