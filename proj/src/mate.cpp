#include "gje/mate.hpp"

#include <cmath>
#include <limits>

namespace gje {

Mat matrix_E(const GeneratingFunction& gf, const FiberPoint& p, double det_floor) {
  Mat e = assemble_E(gf, p.x, p.y, p.z);
  if (std::abs(e.determinant()) <= det_floor)
    throw Error("matrix_E: |det E| below the configured floor");
  return e;
}

Mat coeff_A(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
            std::optional<FiberPoint> seed) {
  ContactState cs = solve_YZ(gf, x, u, p, seed);
  Mat a = gf.hess_xx(x, cs.y, cs.z);
  return 0.5 * (a + a.transpose());
}

MateCoefficients mate_coefficients(const GeneratingFunction& gf, const Vec& x, double u,
                                   const Vec& p, const PsiFn& psi,
                                   std::optional<FiberPoint> seed, double det_floor) {
  MateCoefficients mc;
  mc.contact = solve_YZ(gf, x, u, p, seed);
  mc.E = assemble_E(gf, x, mc.contact.y, mc.contact.z);
  mc.detE = mc.E.determinant();
  if (std::abs(mc.detE) <= det_floor)
    throw Error("mate_coefficients: |det E| below the configured floor");
  mc.E_inv = mc.E.inverse();
  Mat a = gf.hess_xx(x, mc.contact.y, mc.contact.z);
  mc.A = 0.5 * (a + a.transpose());
  mc.B = mc.detE * (psi ? psi(x, u, p) : 1.0);
  return mc;
}

DYResult DY_from_hessian(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                         const Mat& hess_u, std::optional<FiberPoint> seed) {
  DYResult out;
  out.coeffs = mate_coefficients(gf, x, u, p, nullptr, seed);
  out.DY = out.coeffs.E_inv * (hess_u - out.coeffs.A);
  out.det = out.DY.determinant();
  return out;
}

double check_E_is_DpY(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p) {
  const int n = gf.dim();
  ContactState center = solve_YZ(gf, x, u, p);
  Mat e_inv = assemble_E(gf, x, center.y, center.z).inverse();

  const double eps = std::numeric_limits<double>::epsilon();
  Mat jac(n, n);
  for (int j = 0; j < n; ++j) {
    double h = std::cbrt(eps) * (1.0 + std::abs(p[j]));
    Vec pp = p, pm = p;
    pp[j] += h;
    pm[j] -= h;
    FiberPoint warm{x, center.y, center.z};
    ContactState a = solve_YZ(gf, x, u, pp, warm);
    ContactState b = solve_YZ(gf, x, u, pm, warm);
    jac.col(j) = (a.y - b.y) / (2.0 * h);
  }
  return (jac - e_inv).cwiseAbs().maxCoeff();
}

}  // namespace gje
