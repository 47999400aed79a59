#include "addm/basis.hpp"

#include <cmath>

#include "addm/errors.hpp"
#include "addm/quadrature.hpp"

namespace addm {

namespace {

// Legendre values and derivatives P_0..P_q at x in [-1,1].
void legendre_all(double x, int q, std::vector<double>& val, std::vector<double>& der) {
  val.assign(q + 1, 0.0);
  der.assign(q + 1, 0.0);
  val[0] = 1.0;
  if (q >= 1) {
    val[1] = x;
    der[1] = 1.0;
  }
  for (int k = 1; k < q; ++k) {
    val[k + 1] = ((2.0 * k + 1.0) * x * val[k] - k * val[k - 1]) / (k + 1.0);
    der[k + 1] = der[k - 1] + (2.0 * k + 1.0) * val[k];
  }
}

}  // namespace

ElementBasis::ElementBasis(const Triangle& tri, int p) : p_(p) {
  if (p < 0) throw ConfigError("ElementBasis: degree >= 0 required");
  dim_ = polynomial_space_dim(p);
  center_ = centroid(tri);
  double h = 0.0;
  for (int e = 0; e < 3; ++e) h = std::max(h, norm(tri[(e + 1) % 3] - tri[e]));
  scale_ = h > 0.0 ? h : 1.0;

  // Gram matrix of the scaled monomials, exact quadrature.
  const auto quad = triangle_rule(tri, 2 * p);
  Mat gram(dim_, dim_);
  std::vector<double> mon(dim_);
  for (const auto& qp : quad) {
    monomials(qp.p, mon.data());
    for (int a = 0; a < dim_; ++a)
      for (int b = 0; b <= a; ++b) gram(a, b) += qp.w * mon[a] * mon[b];
  }
  for (int a = 0; a < dim_; ++a)
    for (int b = a + 1; b < dim_; ++b) gram(a, b) = gram(b, a);
  coeff_ = invert_lower_triangular(cholesky(gram));
}

void ElementBasis::monomials(Point2 x, double* out) const {
  const double u = (x.x - center_.x) / scale_;
  const double v = (x.y - center_.y) / scale_;
  int idx = 0;
  for (int total = 0; total <= p_; ++total) {
    for (int i = total; i >= 0; --i) {
      int j = total - i;
      out[idx++] = std::pow(u, i) * std::pow(v, j);
    }
  }
}

void ElementBasis::monomial_gradients(Point2 x, double* out_dx, double* out_dy) const {
  const double u = (x.x - center_.x) / scale_;
  const double v = (x.y - center_.y) / scale_;
  int idx = 0;
  for (int total = 0; total <= p_; ++total) {
    for (int i = total; i >= 0; --i) {
      int j = total - i;
      out_dx[idx] = i > 0 ? i * std::pow(u, i - 1) * std::pow(v, j) / scale_ : 0.0;
      out_dy[idx] = j > 0 ? j * std::pow(u, i) * std::pow(v, j - 1) / scale_ : 0.0;
      ++idx;
    }
  }
}

void ElementBasis::values(Point2 x, double* out) const {
  std::vector<double> mon(dim_);
  monomials(x, mon.data());
  for (int a = 0; a < dim_; ++a) {
    double s = 0.0;
    for (int b = 0; b <= a; ++b) s += coeff_(a, b) * mon[b];
    out[a] = s;
  }
}

void ElementBasis::gradients(Point2 x, double* out_dx, double* out_dy) const {
  std::vector<double> mx(dim_), my(dim_);
  monomial_gradients(x, mx.data(), my.data());
  for (int a = 0; a < dim_; ++a) {
    double sx = 0.0, sy = 0.0;
    for (int b = 0; b <= a; ++b) {
      sx += coeff_(a, b) * mx[b];
      sy += coeff_(a, b) * my[b];
    }
    out_dx[a] = sx;
    out_dy[a] = sy;
  }
}

TemporalBasis::TemporalBasis(int q) : q_(q) {
  if (q < 0) throw ConfigError("TemporalBasis: degree >= 0 required");
  at_zero_ = values(0.0);
  at_one_ = values(1.0);
  // Exact Gauss quadrature for the degree 2q-1 integrand.
  deriv_matrix_ = Mat(q + 1, q + 1);
  const auto rule = interval_rule(2 * q);
  for (const auto& g : rule) {
    auto val = values(g.x);
    auto der = derivatives(g.x);
    for (int jt = 0; jt <= q; ++jt)
      for (int j = 0; j <= q; ++j) deriv_matrix_(jt, j) += g.w * der[j] * val[jt];
  }
}

std::vector<double> TemporalBasis::values(double s) const {
  std::vector<double> val, der;
  legendre_all(2.0 * s - 1.0, q_, val, der);
  for (int j = 0; j <= q_; ++j) val[j] *= std::sqrt(2.0 * j + 1.0);
  return val;
}

std::vector<double> TemporalBasis::derivatives(double s) const {
  std::vector<double> val, der;
  legendre_all(2.0 * s - 1.0, q_, val, der);
  for (int j = 0; j <= q_; ++j) der[j] *= 2.0 * std::sqrt(2.0 * j + 1.0);
  return der;
}

}  // namespace addm
