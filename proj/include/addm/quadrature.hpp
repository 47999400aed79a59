#ifndef ADDM_QUADRATURE_HPP
#define ADDM_QUADRATURE_HPP

#include <vector>

#include "addm/geometry.hpp"

namespace addm {

struct QuadPoint1D {
  double x = 0.0;  // abscissa in [0,1]
  double w = 0.0;
};

struct QuadPoint2D {
  Point2 p;
  double w = 0.0;
};

// Gauss-Legendre rule on [0,1] with n points (exact for degree 2n-1).
std::vector<QuadPoint1D> gauss_legendre_unit(int n);

// Rule on [0,1] exact for polynomials of the given total degree.
std::vector<QuadPoint1D> interval_rule(int degree);

// Rule on the physical triangle exact for bivariate polynomials of the
// given total degree. Built from a tensor Gauss rule through the Duffy
// map, so all weights are positive; weights sum to the triangle area.
std::vector<QuadPoint2D> triangle_rule(const Triangle& t, int degree);

// Rule along the segment a->b exact for the given degree; weights sum to
// the segment length.
std::vector<QuadPoint2D> segment_rule(Point2 a, Point2 b, int degree);

}  // namespace addm

#endif
