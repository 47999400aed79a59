#ifndef ADDM_NEWTON_HPP
#define ADDM_NEWTON_HPP

#include <functional>
#include <vector>

#include "addm/assembly.hpp"

namespace addm {

struct NewtonConfig {
  double damping_factor = 0.65;     // applied to lambda on a rejected step
  double refresh_threshold = 0.5;   // refresh A when an accepted step's zeta >= this
  int max_iters = 50;
  double residual_tolerance = 1e-6; // relative ||F|| reduction
  int max_damping_retries = 30;

  void validate() const;
};

struct NewtonReport {
  int newton_iterations = 0;   // iterN: accepted steps
  int gmres_iterations = 0;    // iterL: linear iterations over the slab
  int matrix_evaluations = 0;  // callC: Jacobian evaluations
  std::vector<double> zeta;            // accepted-step monitor values
  std::vector<double> residual_norms;  // ||F|| after each accepted step, [0] = initial
  bool converged = false;
};

// Callbacks wiring the linear solver: matrix_updated is invoked whenever A
// is (re)assembled, solve returns the correction d with its iteration count.
struct LinearSolverHooks {
  std::function<void(const BlockSparseMatrix&)> matrix_updated;
  std::function<std::pair<std::vector<double>, int>(const BlockSparseMatrix&,
                                                    const std::vector<double>&)>
      solve;
};

// Damped Newton iteration on one slab: W_l = W_{l-1} - lambda_l d_l with
// A(W) d = F(W), monitor zeta_l = ||F_l|| / ||F_{l-1}||, lambda halved by
// damping_factor until zeta < 1, and A kept until an accepted step's zeta
// reaches the refresh threshold.
std::pair<std::vector<double>, NewtonReport> newton_solve(const SlabAssembler& assembler,
                                                          const std::vector<double>& w0,
                                                          const std::vector<double>& prev_trace,
                                                          const LinearSolverHooks& hooks,
                                                          const NewtonConfig& config);

}  // namespace addm

#endif
