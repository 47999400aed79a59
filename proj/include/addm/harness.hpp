#ifndef ADDM_HARNESS_HPP
#define ADDM_HARNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "addm/adaptdd.hpp"
#include "addm/config.hpp"

namespace addm {

struct StepRow {
  int step = 0;
  double t = 0.0;
  long long nh = 0;
  int m = 0;
  int s = 0;
  long long nh0 = 0;
  int iter_n = 0;
  long long iter_l = 0;
  long long call_c = 0;
  long long fl = 0;
  double wtime = 0.0;
  double tcomm = 0.0;
  double costs = 0.0;
};

struct RunSummary {
  std::vector<StepRow> rows;
  long long iter_n_total = 0, iter_l_total = 0, call_c_total = 0, fl_total = 0;
  double wtime_total = 0.0, tcomm_total = 0.0, costs_total = 0.0;
  // Accepted-step residual norms per slab (diagnostics).
  std::vector<std::vector<double>> residual_histories;
  History history;  // populated by the adapt strategy only
};

RunSummary run(const RunConfig& config);

void write_run_csv(const RunSummary& summary, const std::string& path);
void write_summary_json(const RunSummary& summary, const RunConfig& config,
                        const std::string& path);

// One slab solved under a prescribed (M, s); shared by the driver, the
// parameter sweep and scenario tests.
struct SlabOutcome {
  std::vector<double> w;
  NewtonReport report;
  SlabLedger ledger;
  StepCost cost;
  long long coarse_size = 0;
  long long max_local_size = 0;
};
SlabOutcome run_slab(const STDGSpace& space, const ModelProblem& problem,
                     const std::vector<double>& w0, const std::vector<double>& trace, double t0,
                     double tau, int num_subdomains, int splitting,
                     const SolverSettings& settings, const HardwareProfile& profile,
                     CostMode cost_mode);

struct SweepCell {
  int m = 0, s = 0;
  bool skipped = false;
  std::string note;
  long long local_elems = 0;   // ~ #Th / M
  long long coarse_elems = 0;  // s M
  long long iter_n = 0, iter_l = 0, call_c = 0, fl = 0;
  double wtime = 0.0, tcomm = 0.0;
};

// Fixed-mesh cross product over (M, s); per-cell medians over `num_seeds`
// runs with seeded perturbations of the initial state.
std::vector<SweepCell> sweep(const RunConfig& config, const std::vector<int>& m_list,
                             const std::vector<int>& s_list, int num_seeds = 3);
void write_sweep_csv(const std::vector<SweepCell>& cells, const std::string& path);

struct PredictReport {
  FittedModels models;
  struct Candidate {
    int m = 0, s = 0;
    CostPrediction prediction;
  };
  std::vector<Candidate> candidates;
  std::pair<int, int> best;
  struct PastPair {
    int index = 0;
    double predicted = 0.0;
    double actual = 0.0;
  };
  std::vector<PastPair> past;  // walk-forward prediction vs realized cost
};

// Fits models from the history, ranks all admissible candidates, and
// replays the history comparing predicted against realized per-step costs.
// comm_fallback supplies communication parameters when the history cannot
// identify them.
PredictReport predict_report(const History& history, double nh, long long num_elements,
                             int core_budget, int n_min,
                             const HardwareProfile* comm_fallback = nullptr, int mlev = 5);

// Realized per-step cost reconstructed from a history record.
double record_actual_cost(const HistoryRecord& r);

std::string describe_models(const FittedModels& models);

}  // namespace addm

#endif
