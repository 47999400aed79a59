#ifndef ADDM_RESTRICTION_HPP
#define ADDM_RESTRICTION_HPP

#include <vector>

#include "addm/block_matrix.hpp"
#include "addm/partition.hpp"
#include "addm/space.hpp"

namespace addm {

// Boolean selection of the fine DoFs owned by one subdomain. Rows are the
// selected global indices in ascending order, so R R^T is the identity on
// the local space.
struct BooleanRestriction {
  std::vector<long long> indices;

  long long local_dim() const { return static_cast<long long>(indices.size()); }
  void apply(const double* x, double* y) const {
    for (std::size_t i = 0; i < indices.size(); ++i) y[i] = x[indices[i]];
  }
  void apply_transpose_add(const double* y, double* x) const {
    for (std::size_t i = 0; i < indices.size(); ++i) x[indices[i]] += y[i];
  }
};

BooleanRestriction subdomain_restriction(const STDGSpace& space, const DecompPlan& plan,
                                         int subdomain);

// Coarse-to-fine basis expansion. Each coarse element carries monomials of
// degree q_c = min over contained elements of p_K, scaled to its bounding
// box and tensorized with the same temporal basis; rows hold the exact
// expansion coefficients in the fine orthonormal basis.
class CoarseRestriction {
 public:
  struct MemberBlock {
    int elem = -1;
    Mat s;  // d_c x d_K spatial projection block
  };

  long long coarse_dim() const { return coarse_dim_; }
  long long fine_dim() const { return fine_dim_; }
  int num_coarse() const { return static_cast<int>(spatial_dim_.size()); }
  int coarse_degree(int c) const { return degree_[c]; }
  int coarse_spatial_dim(int c) const { return spatial_dim_[c]; }
  int coarse_block_size(int c) const { return (q_ + 1) * n_ * spatial_dim_[c]; }
  long long coarse_offset(int c) const { return offset_[c]; }
  const std::vector<MemberBlock>& members(int c) const { return members_[c]; }
  int coarse_of_element(int k) const { return coarse_of_[k]; }
  int temporal_degree() const { return q_; }
  int components() const { return n_; }
  const STDGSpace& fine_space() const { return *space_; }

  void apply(const double* x, double* y) const;            // y = R0 x
  void apply_transpose(const double* y, double* x) const;  // x = R0^T y
  std::vector<double> apply(const std::vector<double>& x) const;
  std::vector<double> apply_transpose(const std::vector<double>& y) const;

  Mat to_dense() const;  // N_H x N_h, for oracles

  friend CoarseRestriction build_coarse_restriction(const STDGSpace& space,
                                                    const DecompPlan& plan);
  friend class STDGSpace;

 private:
  int q_ = 0;
  int n_ = 1;
  long long coarse_dim_ = 0;
  long long fine_dim_ = 0;
  std::vector<int> degree_;
  std::vector<int> spatial_dim_;
  std::vector<long long> offset_;
  std::vector<std::vector<MemberBlock>> members_;
  std::vector<int> coarse_of_;
  const STDGSpace* space_ = nullptr;
};

CoarseRestriction build_coarse_restriction(const STDGSpace& space, const DecompPlan& plan);

// Galerkin coarse matrix A_0 = R_0 A R_0^T with coarse-element-block
// sparsity.
BlockSparseMatrix galerkin_coarse(const BlockSparseMatrix& a, const CoarseRestriction& r0);

}  // namespace addm

#endif
