#ifndef ADDM_CONFIG_HPP
#define ADDM_CONFIG_HPP

#include <string>

#include "addm/costmodel.hpp"
#include "addm/newton.hpp"
#include "addm/problem.hpp"
#include "addm/schedule.hpp"

namespace addm {

enum class Strategy { fix, equi, adapt };

struct SolverSettings {
  PrecondMode mode = PrecondMode::hybrid;
  double gmres_reduction = 1e-4;  // C_L
  int gmres_max_iter = 2000;
  int core_budget = 64;
  int n_min = 10;
  double balance_tol = 0.10;
  unsigned long long seed = 1;
  NewtonConfig newton;
};

// Flat key-value run configuration (see README for the key list).
struct RunConfig {
  ModelProblem problem;
  std::string initial_kind = "bump";  // zero | constant | bump | sine
  double initial_amplitude = 1.0;

  AdaptSchedule::Params schedule;
  int temporal_degree = 1;  // q

  int steps = 10;
  double tau = 0.02;

  Strategy strategy = Strategy::fix;
  int fix_subdomains = 4;          // fix
  double kappa = 4000.0;           // equi
  double kappa_bootstrap = 2500.0; // adapt
  int mlev = 5;

  SolverSettings solver;

  CostMode cost_mode = CostMode::synthetic;
  std::string profile_path;  // empty: built-in reference profile
  HardwareProfile profile = HardwareProfile::reference();

  std::string out_csv;      // per-step StepCost rows
  std::string out_summary;  // JSON totals
  std::string out_history;  // history CSV (adapt)

  // u0(x); also used as the Dirichlet boundary value.
  std::function<double(Point2)> initial_condition() const;
};

RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text);

}  // namespace addm

#endif
