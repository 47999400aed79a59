#ifndef ADDM_BLOCK_MATRIX_HPP
#define ADDM_BLOCK_MATRIX_HPP

#include <string>
#include <vector>

#include "addm/dense.hpp"

namespace addm {

// Sparse matrix of dense blocks keyed by (block row, block col). Fine-mesh
// systems have one diagonal block plus one block per edge neighbor in each
// row; coarse (polygonal) systems reuse the same container with their own
// adjacency.
class BlockSparseMatrix {
 public:
  BlockSparseMatrix() = default;
  explicit BlockSparseMatrix(std::vector<int> block_sizes);

  int num_block_rows() const { return static_cast<int>(block_sizes_.size()); }
  long long size() const { return size_; }
  int block_size(int r) const { return block_sizes_[r]; }
  long long block_offset(int r) const { return block_offsets_[r]; }

  // Find-or-create; newly created blocks are zero.
  Mat& block(int row, int col);
  const Mat* find_block(int row, int col) const;

  struct Entry {
    int col;
    Mat mat;
  };
  const std::vector<Entry>& row_blocks(int row) const { return rows_[row]; }

  std::size_t num_blocks() const;
  void set_zero();

  void matvec(const double* x, double* y) const;  // y = A x
  std::vector<double> matvec(const std::vector<double>& x) const;

  double frobenius_norm() const;
  double max_abs() const;
  bool structurally_symmetric() const;
  double symmetry_defect() const;  // max |A - A^T| entrywise

  Mat to_dense() const;

  // Scalar compressed-column view of the submatrix induced by a subset of
  // block rows/cols (same subset for both). `subset` must be sorted.
  struct Csc {
    int n = 0;
    std::vector<long long> colptr;
    std::vector<int> rowind;
    std::vector<double> values;
  };
  Csc to_csc(const std::vector<int>& subset) const;
  Csc to_csc() const;

  // MatrixMarket coordinate format (debug export).
  void write_matrix_market(const std::string& path) const;

 private:
  std::vector<int> block_sizes_;
  std::vector<long long> block_offsets_;
  long long size_ = 0;
  std::vector<std::vector<Entry>> rows_;
};

}  // namespace addm

#endif
