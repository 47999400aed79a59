#ifndef ADDM_ADAPTDD_HPP
#define ADDM_ADAPTDD_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "addm/costmodel.hpp"

namespace addm {

// Per-time-step observations feeding the fit/predict/choose loop. Index 0
// refers to the global coarse system, index 1 to the largest local system.
struct HistoryRecord {
  long long nh = 0;    // global system size
  long long nh1 = 0;   // largest local system size
  long long nh0 = 0;   // coarse system size
  long long fac_flops0 = 0, fac_flops1 = 0;
  long long sub_flops0 = 0, sub_flops1 = 0;
  double fac_speed0 = 0.0, fac_speed1 = 0.0;
  double sub_speed0 = 0.0, sub_speed1 = 0.0;
  long long call_c = 0;
  long long iter_l = 0;
  int num_subdomains = 0;
  double gather_one = 0.0;  // average wall time of one gather
  double bcast_one = 0.0;   // average wall time of one broadcast

  void validate() const;
};

// Ordered store of records, one per retained time step. When a mesh
// persists over several steps only the last step on it is retained.
class History {
 public:
  void record(std::uint64_t mesh_tag, const HistoryRecord& rec);
  const std::vector<HistoryRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  void save_csv(const std::string& path) const;
  static History load_csv(const std::string& path);

 private:
  std::vector<HistoryRecord> records_;
  std::vector<std::uint64_t> tags_;
};

struct PowerLaw {
  double c = 0.0;
  double mu = 0.0;
  double operator()(double n) const;
};

struct AffineSpeed {
  double a = 0.0;
  double b = 0.0;
  double smax = 0.0;
  bool degenerate = false;  // all sample sizes equal: flat model a = 0
  double operator()(double n) const;
};

struct FittedModels {
  // Index 0: coarse channel, 1: local channel.
  std::array<PowerLaw, 2> fac_flops, sub_flops;
  std::array<AffineSpeed, 2> fac_speed, sub_speed;
  CommParams gather, bcast;
  double call_c_avg = 0.0;
  double iter_l_avg = 0.0;
};

// Log-log linear least squares; returns (C, mu) of fl ~ C N^mu.
// Requires >= 2 samples with distinct N, all values positive.
PowerLaw fit_powerlaw(const std::vector<std::pair<double, double>>& samples);

// Ordinary least squares of speed on N; the cap applies at evaluation
// time. All sizes equal degrades to the flat model with the flag set.
AffineSpeed fit_speed_affine(const std::vector<std::pair<double, double>>& samples, double smax);

// Least squares of T ~ alpha log2(P) + beta N + gamma over (P, N, T)
// samples; needs >= 3 samples spanning >= 2 distinct P and >= 2 distinct N.
CommParams fit_comm(const std::vector<std::array<double, 3>>& samples);

// Arithmetic means of callC and iterL over the last min(mlev, size) records.
std::pair<double, double> running_averages(const History& history, int mlev);

// All admissible (M, s): M <= min(core budget, #elements / n_min) and
// s <= max(1, #elements / M^2).
std::vector<std::pair<int, int>> enumerate_candidates(long long num_elements, int core_budget,
                                                      int n_min);

struct CostPrediction {
  double compute = 0.0;
  double comm = 0.0;
  double total = 0.0;
};

// Predicted per-step cost of a candidate from the fitted models, with
// N1 = Nh/M and N0 = Nh s M / #elements.
CostPrediction predict_cost(const FittedModels& models, double nh, long long num_elements, int m,
                            int s, PrecondMode mode = PrecondMode::hybrid);

// Exhaustive argmin of predict_cost; ties break toward smaller M, then s.
std::pair<int, int> choose(const FittedModels& models, double nh, long long num_elements,
                           const std::vector<std::pair<int, int>>& candidates,
                           PrecondMode mode = PrecondMode::hybrid);

// Start-up rule before fits are usable: M ~ Nh/kappa (unclamped), s the
// largest value with s M <= #elements / (2 M).
std::pair<int, int> bootstrap_choice(double nh, long long num_elements, double kappa);

// True when the history supports all power-law fits (the hard requirement);
// comm and speed fits degrade gracefully inside fit_models.
bool fits_ready(const History& history);

// Windowing per the adaptive algorithm: the last mlev records for flop fits
// and averages, the full history for speed and communication fits.
FittedModels fit_models(const History& history, int mlev = 5);

}  // namespace addm

#endif
