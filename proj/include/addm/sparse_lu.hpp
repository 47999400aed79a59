#ifndef ADDM_SPARSE_LU_HPP
#define ADDM_SPARSE_LU_HPP

#include <string>
#include <vector>

#include "addm/block_matrix.hpp"

namespace addm {

// Exact operation counters of one factorization. Substitution flops are
// defined as 2*nnz(L+U) with the unit diagonal of L implicit and the
// diagonal of U counted once; factorization flops count every executed
// multiply-add pair (2) and pivot division (1).
struct FactorStats {
  long long factor_flops = 0;
  long long subst_flops = 0;
  long long nnz_lu = 0;
  long long fill_in = 0;          // nnz_lu - nnz(A)
  double factor_seconds = -1.0;   // < 0 when not measured
  double subst_seconds = -1.0;
};

// Fill-reducing ordering: greedy minimum degree on an undirected graph
// given by adjacency lists; ties break toward the smallest node index.
std::vector<int> minimum_degree_order(const std::vector<std::vector<int>>& adjacency);

// Expand a block-level permutation to scalar columns.
std::vector<int> expand_block_order(const std::vector<int>& block_order,
                                    const std::vector<int>& block_sizes);

// Sparse LU with partial row pivoting (left-looking, column at a time).
// Columns are processed in the caller-provided fill-reducing order.
class SparseLU {
 public:
  static SparseLU factorize(const BlockSparseMatrix::Csc& a, const std::vector<int>& column_order,
                            const std::string& label = "system");

  int size() const { return n_; }
  const FactorStats& stats() const { return stats_; }

  std::vector<double> solve(const std::vector<double>& rhs) const;
  void solve_inplace(std::vector<double>& x) const;

 private:
  int n_ = 0;
  FactorStats stats_;
  std::vector<int> pivot_row_;      // pivot position -> original row
  std::vector<int> col_of_pos_;     // pivot position -> original column
  std::vector<long long> l_ptr_;    // L columns, strict lower, original rows
  std::vector<int> l_row_;
  std::vector<double> l_val_;
  std::vector<long long> u_ptr_;    // U columns, pivot positions, diag last
  std::vector<int> u_pos_;
  std::vector<double> u_val_;
  std::vector<double> u_diag_;
};

}  // namespace addm

#endif
