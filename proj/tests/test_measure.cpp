#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gje/measure.hpp"
#include "test_util.hpp"

using namespace gje;
using gje::test::vec2;

namespace {

GeneratingFunction wide_bilinear(double ybound = 2.2) {
  DomainBox box = DomainBox::cube(2, -1.0, 1.0, -ybound, ybound, -8.0, 8.0);
  return builtin("bilinear", {}, 2, box);
}

GridPotential quadratic_on_grid(double a, int nodes = 129) {
  Vec ax = GridPotential::linspace(-1.0, 1.0, nodes);
  return GridPotential::from_function(
      ax, ax, [a](const Vec& x) { return 0.5 * a * x.squaredNorm(); });
}

}  // namespace

TEST_CASE("smooth measure: u = |x|^2/2 under bilinear gives mu = |E|") {
  auto gf = wide_bilinear();
  auto u = quadratic_on_grid(1.0, 65);
  Polygon e = Polygon::rectangle(-0.5, -0.5, 0.5, 0.5);
  MeasureReport rep = gma_measure_smooth(gf, u, e);
  CHECK(rep.mu == doctest::Approx(e.area()).epsilon(1e-6));
  CHECK(rep.g_convex_sampled);
  CHECK(rep.negative_cells == 0);
}

TEST_CASE("smooth measure scales as a^2 in 2D") {
  auto gf = wide_bilinear();
  Polygon e = Polygon::rectangle(-0.4, -0.3, 0.4, 0.5);
  for (double a : {0.5, 2.0}) {
    auto u = quadratic_on_grid(a, 65);
    MeasureReport rep = gma_measure_smooth(gf, u, e);
    CHECK(rep.mu / rep.region_area == doctest::Approx(a * a).epsilon(1e-6));
  }
}

TEST_CASE("smooth measure: quad-cost with u = 0 gives mu = |E|") {
  auto gf = builtin("quad-cost");
  Vec ax = GridPotential::linspace(-1.0, 1.0, 65);
  auto u = GridPotential::from_function(ax, ax, [](const Vec&) { return 0.0; });
  Polygon e = Polygon::rectangle(-0.6, -0.2, 0.2, 0.6);
  MeasureReport rep = gma_measure_smooth(gf, u, e);
  CHECK(rep.mu == doctest::Approx(e.area()).epsilon(1e-6));
}

TEST_CASE("smooth measure additivity over disjoint polygons") {
  auto gf = wide_bilinear();
  auto u = quadratic_on_grid(1.5, 65);
  Polygon e1 = Polygon::rectangle(-0.5, -0.5, 0.0, 0.5);
  Polygon e2 = Polygon::rectangle(0.0, -0.5, 0.5, 0.5);
  Polygon whole = Polygon::rectangle(-0.5, -0.5, 0.5, 0.5);
  double m1 = gma_measure_smooth(gf, u, e1).mu;
  double m2 = gma_measure_smooth(gf, u, e2).mu;
  double mw = gma_measure_smooth(gf, u, whole).mu;
  CHECK(mw == doctest::Approx(m1 + m2).epsilon(1e-9));
}

TEST_CASE("dual box counting agrees with the smooth method on quadratics") {
  auto gf = wide_bilinear();
  auto u = quadratic_on_grid(1.0, 129);
  Polygon e = Polygon::rectangle(-0.5, -0.5, 0.5, 0.5);
  DualMeasureOptions opts;
  opts.dual_resolution = 128;
  opts.dual_lo = vec2(-1.2, -1.2);
  opts.dual_hi = vec2(1.2, 1.2);
  MeasureReport dual = gma_measure_nonsmooth(gf, u, e, opts);
  MeasureReport smooth = gma_measure_smooth(gf, u, e);
  CHECK(std::abs(dual.mu - smooth.mu) / smooth.mu < 0.05);
  // Refinement pair recorded; the box count over-approximates and tightens.
  CHECK(dual.mu_coarse >= dual.mu - 1e-12);
}

TEST_CASE("kink potential u = |x1|: image is a null set, box count sees it") {
  auto gf = builtin("bilinear");
  Vec ax = GridPotential::linspace(-1.0, 1.0, 129);
  auto u = GridPotential::from_function(ax, ax,
                                        [](const Vec& x) { return std::abs(x[0]); });
  Polygon band = Polygon::rectangle(-0.2, -0.8, 0.2, 0.8);
  DualMeasureOptions opts;
  opts.dual_resolution = 128;
  MeasureReport rep = gma_measure_nonsmooth(gf, u, band, opts);
  CHECK(rep.mu / band.area() < 0.05);
  CHECK(rep.mu <= rep.mu_coarse + 1e-12);  // trending to zero under refinement
}

TEST_CASE("semi-discrete potential: atomic measure flagged, box count -> 0") {
  auto gf = builtin("bilinear");
  SemiDiscretePotential sd;
  sd.ys = {vec2(0.3, 0.2), vec2(-0.4, 0.1)};
  sd.zs = {0.05, -0.1};
  Polygon e = Polygon::rectangle(-0.9, -0.9, 0.9, 0.9);
  DualMeasureOptions opts;
  opts.dual_resolution = 64;
  MeasureReport rep = gma_measure_nonsmooth(gf, sd, e, opts);
  double cell = (2.0 / 64) * (2.0 / 64);
  CHECK(rep.mu <= 4.0 * cell + 1e-12);
  bool atomic_note = false;
  for (const auto& n : rep.notes) atomic_note |= n.find("atomic") != std::string::npos;
  CHECK(atomic_note);
}

TEST_CASE("semi-discrete active sets respect the tie tolerance") {
  auto gf = builtin("bilinear");
  SemiDiscretePotential sd;
  sd.ys = {vec2(1.0, 0.0), vec2(-1.0, 0.0)};
  sd.zs = {0.0, 0.0};
  // Supports x1 - z and -x1 - z cross along x1 = 0.
  auto on_kink = sd.active(gf, vec2(0.0, 0.3));
  CHECK(on_kink.size() == 2);
  auto off_kink = sd.active(gf, vec2(0.5, 0.3));
  REQUIRE(off_kink.size() == 1);
  CHECK(off_kink[0] == 0);
  CHECK(sd.eval(gf, vec2(0.5, 0.3)) == doctest::Approx(0.5));
}

TEST_CASE("alexandrov_verdict rows and margins") {
  auto gf = wide_bilinear();
  Polygon e = Polygon::rectangle(-0.5, -0.5, 0.5, 0.5);

  auto u1 = quadratic_on_grid(1.0, 65);
  MeasureReport r1 = gma_measure_smooth(gf, u1, e);
  AlexandrovVerdict v1 = alexandrov_verdict({r1}, 0.5, 2.0);
  CHECK(v1.lower_pass);
  CHECK(v1.upper_pass);
  CHECK(v1.rows[0].lower.ratio == doctest::Approx(1.0).epsilon(1e-6));

  // Steep quadratic: ratio a^2 = 4 violates an upper bound of 3.
  auto u2 = quadratic_on_grid(2.0, 65);
  MeasureReport r2 = gma_measure_smooth(gf, u2, e);
  AlexandrovVerdict v2 = alexandrov_verdict({r2}, 1.0, 3.0);
  CHECK(v2.lower_pass);
  CHECK_FALSE(v2.upper_pass);
  CHECK(v2.rows[0].upper.margin < 0.0);

  // Kink potential: mu = 0 fails any positive lower bound.
  auto gfk = builtin("bilinear");
  Vec ax = GridPotential::linspace(-1.0, 1.0, 65);
  auto uk = GridPotential::from_function(ax, ax,
                                         [](const Vec& x) { return std::abs(x[0]); });
  DualMeasureOptions opts;
  opts.dual_resolution = 64;
  Polygon band = Polygon::rectangle(-0.2, -0.8, 0.2, 0.8);
  MeasureReport rk = gma_measure_nonsmooth(gfk, uk, band, opts);
  AlexandrovVerdict vk = alexandrov_verdict({rk}, 0.1, 2.0);
  CHECK_FALSE(vk.lower_pass);
}

TEST_CASE("dual inequality: X_v measure satisfies the reciprocal lower bound") {
  // Fixture where mu <= C|E| passes with C = 2; the dual measure then obeys
  // |X_v(A)| >= |A| / C within tolerance.
  auto gf = wide_bilinear(1.2);
  auto u = quadratic_on_grid(1.0, 65);
  Vec yax = GridPotential::linspace(-1.0, 1.0, 65);
  TransformResult v = g_star_transform(gf, u, yax, yax);
  REQUIRE(v.invalid_nodes == 0);

  auto dual = dual_function_object(gf);
  Polygon a = Polygon::rectangle(-0.4, -0.4, 0.4, 0.4);
  DualMeasureOptions opts;
  opts.dual_resolution = 64;
  opts.dual_lo = vec2(-1.0, -1.0);
  opts.dual_hi = vec2(1.0, 1.0);
  MeasureReport rep = gma_measure_nonsmooth(dual, v.potential(), a, opts);
  double C = 2.0;
  CHECK(rep.mu >= a.area() / C * (1.0 - 0.1));
}
