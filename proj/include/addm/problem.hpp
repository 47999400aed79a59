#ifndef ADDM_PROBLEM_HPP
#define ADDM_PROBLEM_HPP

#include <functional>

#include "addm/geometry.hpp"

namespace addm {

// Scalar nonlinear convection-diffusion model problem
//
//   du/dt + d/dx f(u) + d/dy f(u) - eps * Lap(u) = g(x, t)
//
// with f(u) = u^2/2 (viscous Burgers type) or f(u) = c u (linear variant
// for tests). Faces use a local Lax-Friedrichs convective flux and
// symmetric interior penalty diffusion.
struct ModelProblem {
  enum class Flux { burgers, linear };
  enum class Boundary { dirichlet, periodic };

  double viscosity = 0.01;        // eps > 0
  Flux flux = Flux::burgers;
  double linear_speed = 1.0;      // c in f(u) = c u
  double penalty_constant = 20.0; // C_W in sigma = C_W max(p,p')^2 / h
  Boundary boundary = Boundary::dirichlet;
  std::function<double(Point2, double)> dirichlet_value;  // u_D(x,t); null = 0
  std::function<double(Point2, double)> source;           // g(x,t); null = 0

  void validate() const;

  double flux_value(double u) const {
    return flux == Flux::burgers ? 0.5 * u * u : linear_speed * u;
  }
  double flux_deriv(double u) const { return flux == Flux::burgers ? u : linear_speed; }
  double flux_second_deriv() const { return flux == Flux::burgers ? 1.0 : 0.0; }

  double boundary_value(Point2 x, double t) const {
    return dirichlet_value ? dirichlet_value(x, t) : 0.0;
  }
  double source_value(Point2 x, double t) const { return source ? source(x, t) : 0.0; }
};

}  // namespace addm

#endif
