#include "addm/newton.hpp"

#include <cmath>

#include "addm/errors.hpp"

namespace addm {

void NewtonConfig::validate() const {
  if (!(damping_factor > 0.0 && damping_factor < 1.0))
    throw ConfigError("NewtonConfig: damping factor must lie in (0,1)");
  if (!(refresh_threshold >= 0.0 && refresh_threshold <= 1.0))
    throw ConfigError("NewtonConfig: refresh threshold must lie in [0,1]");
  if (max_iters < 1) throw ConfigError("NewtonConfig: max_iters >= 1 required");
  if (!(residual_tolerance > 0.0)) throw ConfigError("NewtonConfig: tolerance must be positive");
  if (max_damping_retries < 0) throw ConfigError("NewtonConfig: max_damping_retries >= 0");
}

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::pair<std::vector<double>, NewtonReport> newton_solve(const SlabAssembler& assembler,
                                                          const std::vector<double>& w0,
                                                          const std::vector<double>& prev_trace,
                                                          const LinearSolverHooks& hooks,
                                                          const NewtonConfig& config) {
  config.validate();
  NewtonReport report;
  std::vector<double> w = w0;
  std::vector<double> f = assembler.residual(w, prev_trace);
  double fnorm = norm2(f);
  report.residual_norms.push_back(fnorm);
  if (fnorm == 0.0) {
    report.converged = true;
    return {std::move(w), report};
  }
  const double target = config.residual_tolerance * fnorm;

  BlockSparseMatrix a = assembler.jacobian(w);
  report.matrix_evaluations = 1;
  hooks.matrix_updated(a);

  for (int ell = 1; ell <= config.max_iters; ++ell) {
    auto [d, iters] = hooks.solve(a, f);
    report.gmres_iterations += iters;

    double lambda = 1.0;
    std::vector<double> w_trial(w.size());
    std::vector<double> f_trial;
    double fnorm_trial = 0.0, zeta = 0.0;
    std::vector<double> zeta_tries;
    for (int retry = 0;; ++retry) {
      for (std::size_t i = 0; i < w.size(); ++i) w_trial[i] = w[i] - lambda * d[i];
      f_trial = assembler.residual(w_trial, prev_trace);
      fnorm_trial = norm2(f_trial);
      zeta = fnorm_trial / fnorm;
      if (zeta < 1.0) break;
      zeta_tries.push_back(zeta);
      if (retry >= config.max_damping_retries)
        throw ConvergenceError(
            "newton_solve: step rejected after " + std::to_string(retry + 1) +
                " damping retries (zeta stayed >= 1)",
            zeta_tries);
      lambda *= config.damping_factor;
    }

    w.swap(w_trial);
    f.swap(f_trial);
    fnorm = fnorm_trial;
    ++report.newton_iterations;
    report.zeta.push_back(zeta);
    report.residual_norms.push_back(fnorm);

    if (fnorm <= target) {
      report.converged = true;
      break;
    }
    // Remark-style reuse: keep the stale matrix (and its preconditioner
    // factorization) while the monitor stays below the threshold.
    if (zeta >= config.refresh_threshold && ell < config.max_iters) {
      a = assembler.jacobian(w);
      ++report.matrix_evaluations;
      hooks.matrix_updated(a);
    }
  }
  return {std::move(w), report};
}

}  // namespace addm
