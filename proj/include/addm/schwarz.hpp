#ifndef ADDM_SCHWARZ_HPP
#define ADDM_SCHWARZ_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "addm/restriction.hpp"
#include "addm/sparse_lu.hpp"

namespace addm {

enum class PrecondMode { additive, hybrid };

// Per-system record in the preconditioner's flop ledger.
struct SystemCost {
  long long size = 0;
  long long fac_flops = 0;
  long long sub_flops = 0;
  double fac_seconds = -1.0;  // measured mode only
  double sub_seconds = -1.0;
};

// Two-level Schwarz preconditioner with direct (sparse LU) local and coarse
// solves. The matrix passed to factorize() is kept by reference for the
// hybrid residual product and must outlive the preconditioner applications.
class TwoLevelPreconditioner {
 public:
  TwoLevelPreconditioner(PrecondMode mode, const STDGSpace& space, const DecompPlan& plan);

  void set_coarse(CoarseRestriction r0);
  bool has_coarse() const { return coarse_.has_value(); }
  PrecondMode mode() const { return mode_; }
  int num_subdomains() const { return plan_.num_subdomains; }
  const DecompPlan& plan() const { return plan_; }
  const CoarseRestriction& coarse_restriction() const { return *coarse_; }
  const BlockSparseMatrix& coarse_matrix() const;

  // Factorizes all subdomain blocks A_i = R_i A R_i^T and the Galerkin
  // coarse matrix A_0 = R_0 A R_0^T. With measure_timing, each system's
  // factorization and substitution wall time is sampled (median of 3).
  void factorize(const BlockSparseMatrix& a, bool measure_timing = false);
  bool factorized() const { return factorized_; }

  std::vector<double> apply(const std::vector<double>& x) const;
  std::vector<double> apply_additive(const std::vector<double>& x) const;
  std::vector<double> apply_hybrid(const std::vector<double>& x) const;

  // Ledger: entry 0 is the coarse system (size 0 when absent), entries
  // 1..M the subdomain systems.
  const std::vector<SystemCost>& ledger() const { return ledger_; }
  long long apply_count() const { return apply_count_; }
  // max over factorizations / per-apply substitution flops by mode.
  long long fac_flops_max() const;
  long long apply_subst_flops() const;
  long long max_local_size() const;

 private:
  PrecondMode mode_;
  const STDGSpace* space_;
  DecompPlan plan_;
  std::vector<BooleanRestriction> restrictions_;
  std::optional<CoarseRestriction> coarse_;
  std::vector<SparseLU> local_lu_;
  std::optional<SparseLU> coarse_lu_;
  std::optional<BlockSparseMatrix> coarse_matrix_;
  const BlockSparseMatrix* a_ = nullptr;
  std::vector<SystemCost> ledger_;
  bool factorized_ = false;
  mutable long long apply_count_ = 0;
};

struct GmresResult {
  std::vector<double> x;
  int iterations = 0;
  std::vector<double> history;  // preconditioned residual norms, [0] = initial
  bool converged = false;
};

// Full (non-restarted) GMRES on the left-preconditioned system with zero
// initial guess; stops when the preconditioned residual norm drops below
// reduction * its initial value. Throws ConvergenceError at max_iter.
GmresResult gmres(const BlockSparseMatrix& a, const TwoLevelPreconditioner* precond,
                  const std::vector<double>& rhs, double reduction, int max_iter);

}  // namespace addm

#endif
