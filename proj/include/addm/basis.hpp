#ifndef ADDM_BASIS_HPP
#define ADDM_BASIS_HPP

#include <vector>

#include "addm/dense.hpp"
#include "addm/geometry.hpp"

namespace addm {

// L2-orthonormal polynomial basis of total degree p on a physical triangle,
// built from centroid-scaled monomials through a Gram-matrix Cholesky.
class ElementBasis {
 public:
  ElementBasis() = default;
  ElementBasis(const Triangle& tri, int p);

  int degree() const { return p_; }
  int dim() const { return dim_; }

  // Values of all basis functions at a point.
  void values(Point2 x, double* out) const;
  // Gradients (d/dx, d/dy) of all basis functions at a point.
  void gradients(Point2 x, double* out_dx, double* out_dy) const;

  // Coefficients of the basis in the scaled monomial frame (row a holds
  // phi_a); exposed for projection tests.
  const Mat& monomial_coefficients() const { return coeff_; }

 private:
  void monomials(Point2 x, double* out) const;
  void monomial_gradients(Point2 x, double* out_dx, double* out_dy) const;

  int p_ = 0;
  int dim_ = 0;
  Point2 center_;
  double scale_ = 1.0;
  Mat coeff_;
};

// Orthonormal Legendre basis on the unit interval [0,1] (temporal basis of
// one time slab mapped to s in [0,1]).
class TemporalBasis {
 public:
  explicit TemporalBasis(int q);

  int degree() const { return q_; }
  int dim() const { return q_ + 1; }

  std::vector<double> values(double s) const;
  std::vector<double> derivatives(double s) const;

  // D(jt, j) = int_0^1 theta_j'(s) theta_jt(s) ds  (trial differentiated).
  const Mat& derivative_matrix() const { return deriv_matrix_; }
  const std::vector<double>& values_at_zero() const { return at_zero_; }
  const std::vector<double>& values_at_one() const { return at_one_; }

 private:
  int q_ = 0;
  Mat deriv_matrix_;
  std::vector<double> at_zero_;
  std::vector<double> at_one_;
};

// Number of bivariate monomials of total degree <= p.
inline int polynomial_space_dim(int p) { return (p + 1) * (p + 2) / 2; }

}  // namespace addm

#endif
