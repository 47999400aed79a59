#ifndef ADDM_COSTMODEL_HPP
#define ADDM_COSTMODEL_HPP

#include <string>
#include <vector>

#include "addm/schwarz.hpp"

namespace addm {

// speed(N) = a N / (b + N); a is the asymptotic speed.
double speed_saturating(double n, double a, double b);
// speed(N) = min(smax, a N + b).
double speed_affine_capped(double n, double a, double b, double smax);
// alpha log2(P) + beta N + gamma.
double comm_time_one(double n, double p, double alpha, double beta, double gamma);

struct SpeedCurve {
  enum class Form { saturating, affine };
  Form form = Form::saturating;
  double a = 0.0;
  double b = 0.0;
  double smax = 0.0;  // <= 0 means uncapped

  double value(double n) const;
};

struct CommParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double time(double n, double p) const { return comm_time_one(n, p, alpha, beta, gamma); }
};

// Speed curves for the four channels (factorization/substitution x fine
// triangular / coarse polygonal) plus the gather and broadcast parameters.
struct HardwareProfile {
  SpeedCurve fac_tri, fac_poly, sub_tri, sub_poly;
  CommParams gather, bcast;

  // Published cluster fit: saturating curves for all four channels, with
  // communication parameters in the same regime as the measured data.
  static HardwareProfile reference();
  static HardwareProfile load(const std::string& path);
  void save(const std::string& path) const;
};

// Total flops per node for one time step: callC * FFfac + iterL * FFass.
// Ledger convention: entry 0 is the coarse system (size 0 when absent),
// entries 1..M the subdomain systems.
long long step_flops(long long call_c, long long iter_l, const std::vector<long long>& fac_flops,
                     const std::vector<long long>& sub_flops, PrecondMode mode);

// Computation wall time composed across task levels: factorizations in
// parallel (max), substitutions parallel over locals and, for the hybrid
// preconditioner, sequential with the coarse solve.
double step_walltime(long long call_c, long long iter_l, const std::vector<long long>& sizes,
                     const std::vector<long long>& fac_flops,
                     const std::vector<long long>& sub_flops, const HardwareProfile& profile,
                     PrecondMode mode);

// One gather + one broadcast per GMRES iteration.
double step_comm(long long iter_l, double n_gather, double n_bcast, double cores,
                 const HardwareProfile& profile);

// Literal composition law: sum over levels of (max over tasks + comm).
double compose_task_levels(const std::vector<std::vector<double>>& level_times,
                           const std::vector<double>& comm_times);

struct StepCost {
  long long flops = 0;   // fl_m
  double wtime = 0.0;    // computation wall time
  double tcomm = 0.0;    // communication wall time
  double costs = 0.0;    // wtime + tcomm
  // Per-system times behind the composition (index as the ledger).
  std::vector<double> fac_seconds;
  std::vector<double> sub_seconds;
};

enum class CostMode { synthetic, measured };

// Everything the executor needs about one completed slab.
struct SlabLedger {
  long long call_c = 0;
  long long iter_l = 0;
  int num_subdomains = 0;
  std::vector<long long> sizes;      // [0] coarse (0 when absent), then locals
  std::vector<long long> fac_flops;
  std::vector<long long> sub_flops;
  std::vector<double> fac_seconds;   // measured mode inputs; empty otherwise
  std::vector<double> sub_seconds;
  PrecondMode mode = PrecondMode::hybrid;

  static SlabLedger from_preconditioner(const TwoLevelPreconditioner& precond, long long call_c,
                                        long long iter_l);
};

// Composes per-system flop counts (synthetic) or sampled wall times
// (measured) into the per-step cost via the task-level max rule, and adds
// the modeled communication. The gather length is the largest local size,
// the broadcast length the coarse size.
StepCost simulate_parallel_step(const SlabLedger& ledger, const HardwareProfile& profile,
                                CostMode mode);

}  // namespace addm

#endif
