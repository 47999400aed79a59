#ifndef ADDM_SPACE_HPP
#define ADDM_SPACE_HPP

#include <functional>
#include <memory>
#include <vector>

#include "addm/basis.hpp"
#include "addm/mesh.hpp"

namespace addm {

// (q+1) * n * sum_K (p_K+1)(p_K+2)/2
long long dof_count(const TriMesh& mesh, int temporal_degree, int n_components);

// Space-time DG space on one time slab: per-element orthonormal spatial
// bases of degree p_K tensorized with Legendre polynomials in time.
//
// Local coefficient layout inside an element: index (j, i, c) flattened as
// (j * d_K + i) * n + c with temporal mode j, spatial mode i, component c.
class STDGSpace {
 public:
  STDGSpace(std::shared_ptr<const TriMesh> mesh, int temporal_degree, int n_components = 1);

  const TriMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const TriMesh> mesh_ptr() const { return mesh_; }
  int temporal_degree() const { return q_; }
  int components() const { return n_; }
  const TemporalBasis& temporal_basis() const { return temporal_; }
  const ElementBasis& element_basis(int k) const { return bases_[k]; }

  long long dim() const { return dim_; }
  long long spatial_dim() const { return spatial_dim_; }

  int block_size(int k) const { return block_size_[k]; }
  long long block_offset(int k) const { return block_offset_[k]; }
  int spatial_block_size(int k) const { return n_ * bases_[k].dim(); }
  long long spatial_offset(int k) const { return spatial_offset_[k]; }

  int local_index(int k, int j, int i, int c = 0) const {
    return (j * bases_[k].dim() + i) * n_ + c;
  }

  // Coefficients of the L2 projection of a spatial function (component 0;
  // scalar spaces only). extra_quad_degree pads the exactness degree used
  // per element beyond 2 p_K for non-polynomial integrands.
  std::vector<double> project_spatial(const std::function<double(Point2)>& f,
                                      int extra_quad_degree = 4) const;

  // Space-time L2 projection of f(x, t) on the slab [t0, t0+tau].
  std::vector<double> project(const std::function<double(Point2, double)>& f, double t0,
                              double tau, int extra_quad_degree = 4) const;

  // Spatial coefficients of w(t_m^-), i.e. the temporal trace at s = 1.
  std::vector<double> end_value(const std::vector<double>& w) const;

  // Evaluate a spatial coefficient vector at a point of element k.
  double eval_spatial(const std::vector<double>& coeffs, int k, Point2 x, int c = 0) const;

  // L2 norm over the domain of a spatial coefficient function (orthonormal
  // basis: the Euclidean norm of the coefficients).
  double spatial_l2_norm(const std::vector<double>& coeffs) const;

 private:
  std::shared_ptr<const TriMesh> mesh_;
  int q_ = 0;
  int n_ = 1;
  TemporalBasis temporal_;
  std::vector<ElementBasis> bases_;
  std::vector<int> block_size_;
  std::vector<long long> block_offset_;
  std::vector<long long> spatial_offset_;
  long long dim_ = 0;
  long long spatial_dim_ = 0;
};

// Exact L2 projection of a spatial trace between two meshes of the same
// hierarchy. `old_end_value` holds spatial coefficients on `from`; the
// result holds spatial coefficients on `to`. Exact for piecewise
// polynomials (overlaps are integrated on a clipped common refinement).
std::vector<double> transfer_trace(const STDGSpace& from, const std::vector<double>& old_end_value,
                                   const STDGSpace& to);

}  // namespace addm

#endif
