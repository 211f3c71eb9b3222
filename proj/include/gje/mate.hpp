#pragma once

#include <functional>
#include <optional>

#include "gje/duality.hpp"
#include "gje/genfun.hpp"

namespace gje {

/// The Monge-Ampere-type structure at a contact state: the matrix E, its
/// inverse and determinant, the coefficient matrix A = g_xx at the contact,
/// and B = det(E) * psi.
struct MateCoefficients {
  Mat E;
  Mat E_inv;
  double detE = 0.0;
  Mat A;
  double B = 0.0;
  ContactState contact;
};

using PsiFn = std::function<double(const Vec&, double, const Vec&)>;

/// E_ij = g_{x_i y_j} - g_z^{-1} g_{x_i z} g_{y_j}; raises on |det E| below floor.
Mat matrix_E(const GeneratingFunction& gf, const FiberPoint& p,
             double det_floor = tol::det_e_floor);

/// A(x,u,p) = g_xx at the contact state, symmetrized.
Mat coeff_A(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
            std::optional<FiberPoint> seed = {});

/// Full coefficient bundle; psi defaults to 1.
MateCoefficients mate_coefficients(const GeneratingFunction& gf, const Vec& x, double u,
                                   const Vec& p, const PsiFn& psi = nullptr,
                                   std::optional<FiberPoint> seed = {},
                                   double det_floor = tol::det_e_floor);

struct DYResult {
  Mat DY;          // E^{-1}(hess_u - A)
  double det = 0.0;  // det DY, the left side of the Jacobian equation
  MateCoefficients coeffs;
};

/// DY(.,u,Du) = E^{-1}[D^2u - A(.,u,Du)]  (the derivative identity).
DYResult DY_from_hessian(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p,
                         const Mat& hess_u, std::optional<FiberPoint> seed = {});

/// Max-norm discrepancy between E^{-1} and the finite-difference Jacobian of
/// p -> Y(x,u,p); the identity E^{i,j} = D_{p_j} Y^i.
double check_E_is_DpY(const GeneratingFunction& gf, const Vec& x, double u, const Vec& p);

}  // namespace gje
