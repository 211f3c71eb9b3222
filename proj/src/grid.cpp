#include "gje/grid.hpp"

#include <cmath>

namespace gje {

Vec spline_second_derivs(const Eigen::Ref<const Vec>& f, double h) {
  const int m = static_cast<int>(f.size());
  if (m < 4) throw Error("spline: need at least 4 nodes");
  Vec d(m);
  for (int i = 1; i + 1 < m; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h;

  Vec M(m);
  // Not-a-knot pins the second derivative directly at nodes 1 and m-2
  // (substituting M_0 = 2M_1 - M_2 into the first interior equation).
  M[1] = d[1] / h;
  M[m - 2] = d[m - 2] / h;

  // Tridiagonal solve for M_2 .. M_{m-3}.
  const int unknowns = m - 4;
  if (unknowns > 0) {
    Vec rhs(unknowns), diag(unknowns), c_prime(unknowns);
    for (int k = 0; k < unknowns; ++k) {
      int i = k + 2;
      rhs[k] = d[i];
      diag[k] = 2.0 * h / 3.0;
    }
    rhs[0] -= (h / 6.0) * M[1];
    rhs[unknowns - 1] -= (h / 6.0) * M[m - 2];
    const double off = h / 6.0;
    // Thomas algorithm.
    c_prime[0] = off / diag[0];
    rhs[0] /= diag[0];
    for (int k = 1; k < unknowns; ++k) {
      double denom = diag[k] - off * c_prime[k - 1];
      c_prime[k] = off / denom;
      rhs[k] = (rhs[k] - off * rhs[k - 1]) / denom;
    }
    for (int k = unknowns - 2; k >= 0; --k) rhs[k] -= c_prime[k] * rhs[k + 1];
    for (int k = 0; k < unknowns; ++k) M[k + 2] = rhs[k];
  }

  M[0] = 2.0 * M[1] - M[2];
  M[m - 1] = 2.0 * M[m - 2] - M[m - 3];
  return M;
}

double spline_eval(const Eigen::Ref<const Vec>& f, const Eigen::Ref<const Vec>& m, double t0,
                   double h, double t, int deriv) {
  const int n = static_cast<int>(f.size());
  int i = static_cast<int>(std::floor((t - t0) / h));
  if (i < 0) i = 0;
  if (i > n - 2) i = n - 2;
  double theta = (t - (t0 + i * h)) / h;
  double a = 1.0 - theta;
  switch (deriv) {
    case 0:
      return f[i] * a + f[i + 1] * theta +
             (h * h / 6.0) * ((a * a * a - a) * m[i] + (theta * theta * theta - theta) * m[i + 1]);
    case 1:
      return (f[i + 1] - f[i]) / h +
             (h / 6.0) * ((1.0 - 3.0 * a * a) * m[i] + (3.0 * theta * theta - 1.0) * m[i + 1]);
    case 2:
      return a * m[i] + theta * m[i + 1];
    default:
      throw Error("spline_eval: derivative order must be 0, 1, or 2");
  }
}

GridPotential::GridPotential(Vec axis0, Vec axis1, Mat values)
    : axis0_(std::move(axis0)), axis1_(std::move(axis1)), values_(std::move(values)) {
  if (values_.rows() != axis0_.size() || values_.cols() != axis1_.size())
    throw Error("GridPotential: axes/values shape mismatch");
  if (axis0_.size() < 4 || axis1_.size() < 4)
    throw Error("GridPotential: need at least 4 nodes per axis");
  h0_ = axis0_[1] - axis0_[0];
  h1_ = axis1_[1] - axis1_[0];
  for (int i = 1; i < axis0_.size(); ++i)
    if (std::abs(axis0_[i] - axis0_[i - 1] - h0_) > 1e-9 * std::abs(h0_))
      throw Error("GridPotential: axis 0 must be uniform");
  for (int j = 1; j < axis1_.size(); ++j)
    if (std::abs(axis1_[j] - axis1_[j - 1] - h1_) > 1e-9 * std::abs(h1_))
      throw Error("GridPotential: axis 1 must be uniform");
  m0_.resize(values_.rows(), values_.cols());
  for (int j = 0; j < values_.cols(); ++j)
    m0_.col(j) = spline_second_derivs(values_.col(j), h0_);
}

Vec GridPotential::linspace(double a, double b, int count) {
  Vec v(count);
  for (int i = 0; i < count; ++i) v[i] = a + (b - a) * i / (count - 1);
  return v;
}

GridPotential GridPotential::from_function(const Vec& axis0, const Vec& axis1,
                                           const std::function<double(const Vec&)>& fn) {
  Mat values(axis0.size(), axis1.size());
  Vec x(2);
  for (int i = 0; i < axis0.size(); ++i)
    for (int j = 0; j < axis1.size(); ++j) {
      x[0] = axis0[i];
      x[1] = axis1[j];
      values(i, j) = fn(x);
    }
  return GridPotential(axis0, axis1, std::move(values));
}

Vec GridPotential::node_point(int i, int j) const {
  Vec x(2);
  x[0] = axis0_[i];
  x[1] = axis1_[j];
  return x;
}

bool GridPotential::in_bounds(const Vec& x, double margin) const {
  return x[0] >= axis0_[0] + margin && x[0] <= axis0_[n0() - 1] - margin &&
         x[1] >= axis1_[0] + margin && x[1] <= axis1_[n1() - 1] - margin;
}

double GridPotential::boundary_distance(const Vec& x) const {
  double d0 = std::min(x[0] - axis0_[0], axis0_[n0() - 1] - x[0]);
  double d1 = std::min(x[1] - axis1_[0], axis1_[n1() - 1] - x[1]);
  return std::min(d0, d1);
}

void GridPotential::eval_all(const Vec& x, double* u, Vec* grad, Mat* hess) const {
  if (!in_bounds(x, -1e-9)) throw LeftDomain("GridPotential: evaluation outside the grid");
  double a = std::min(std::max(x[0], axis0_[0]), axis0_[n0() - 1]);
  double b = std::min(std::max(x[1], axis1_[0]), axis1_[n1() - 1]);

  const int cols = n1();
  Vec row_v(cols), row_d(cols), row_dd(cols);
  const bool need_grad = grad != nullptr || hess != nullptr;
  const bool need_hess = hess != nullptr;
  for (int j = 0; j < cols; ++j) {
    row_v[j] = spline_eval(values_.col(j), m0_.col(j), axis0_[0], h0_, a, 0);
    if (need_grad) row_d[j] = spline_eval(values_.col(j), m0_.col(j), axis0_[0], h0_, a, 1);
    if (need_hess) row_dd[j] = spline_eval(values_.col(j), m0_.col(j), axis0_[0], h0_, a, 2);
  }
  Vec mv = spline_second_derivs(row_v, h1_);
  if (u) *u = spline_eval(row_v, mv, axis1_[0], h1_, b, 0);
  if (need_grad) {
    Vec md = spline_second_derivs(row_d, h1_);
    if (grad) {
      grad->resize(2);
      (*grad)[0] = spline_eval(row_d, md, axis1_[0], h1_, b, 0);
      (*grad)[1] = spline_eval(row_v, mv, axis1_[0], h1_, b, 1);
    }
    if (need_hess) {
      Vec mdd = spline_second_derivs(row_dd, h1_);
      hess->resize(2, 2);
      (*hess)(0, 0) = spline_eval(row_dd, mdd, axis1_[0], h1_, b, 0);
      (*hess)(1, 1) = spline_eval(row_v, mv, axis1_[0], h1_, b, 2);
      (*hess)(0, 1) = spline_eval(row_d, md, axis1_[0], h1_, b, 1);
      (*hess)(1, 0) = (*hess)(0, 1);
    }
  }
}

double GridPotential::value(const Vec& x) const {
  double u;
  eval_all(x, &u, nullptr, nullptr);
  return u;
}

Vec GridPotential::gradient(const Vec& x) const {
  Vec g;
  eval_all(x, nullptr, &g, nullptr);
  return g;
}

Mat GridPotential::hessian(const Vec& x) const {
  Mat h;
  eval_all(x, nullptr, nullptr, &h);
  return h;
}

Mat GridPotential::fd_hessian_at_node(int i, int j) const {
  if (i < 1 || j < 1 || i > n0() - 2 || j > n1() - 2)
    throw Error("fd_hessian_at_node: node not interior");
  Mat h(2, 2);
  h(0, 0) = (values_(i + 1, j) - 2.0 * values_(i, j) + values_(i - 1, j)) / (h0_ * h0_);
  h(1, 1) = (values_(i, j + 1) - 2.0 * values_(i, j) + values_(i, j - 1)) / (h1_ * h1_);
  h(0, 1) = (values_(i + 1, j + 1) - values_(i + 1, j - 1) - values_(i - 1, j + 1) +
             values_(i - 1, j - 1)) /
            (4.0 * h0_ * h1_);
  h(1, 0) = h(0, 1);
  return h;
}

GridPotential GridPotential::add_constant(double c) const {
  Mat v = values_.array() + c;
  return GridPotential(axis0_, axis1_, std::move(v));
}

}  // namespace gje
