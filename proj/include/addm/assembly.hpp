#ifndef ADDM_ASSEMBLY_HPP
#define ADDM_ASSEMBLY_HPP

#include <vector>

#include "addm/block_matrix.hpp"
#include "addm/problem.hpp"
#include "addm/space.hpp"

namespace addm {

// Assembler for one time slab. Basis tables at quadrature points are built
// once at construction and shared by residual and Jacobian evaluations.
class SlabAssembler {
 public:
  SlabAssembler(const STDGSpace& space, const ModelProblem& problem, double slab_start,
                double tau);

  // F_alpha = A_{h,m}(w, psi_alpha); prev_trace holds the spatial
  // coefficients of the previous end value, already on this mesh.
  std::vector<double> residual(const std::vector<double>& w,
                               const std::vector<double>& prev_trace) const;

  // Exact linearization of residual() with respect to w.
  BlockSparseMatrix jacobian(const std::vector<double>& w) const;

  const STDGSpace& space() const { return *space_; }
  double tau() const { return tau_; }
  double slab_start() const { return t0_; }

 private:
  struct VolumeTables {
    std::vector<double> weights;
    std::vector<Point2> points;
    Mat phi, dphix, dphiy;  // (#pts) x d_K
  };
  struct FaceSide {
    int elem = -1;
    Mat phi, dphix, dphiy;  // (#pts) x d_K on this side
  };
  struct FaceTables {
    std::vector<double> weights;
    std::vector<Point2> points;   // on the minus side
    Point2 normal;                // unit, from minus to plus
    double sigma = 0.0;           // interior penalty coefficient
    FaceSide minus, plus;         // plus.elem = -1 on a Dirichlet face
  };

  void spatial_state(const std::vector<double>& w, const std::vector<double>& theta,
                     std::vector<double>& v) const;

  const STDGSpace* space_;
  const ModelProblem* problem_;
  double t0_ = 0.0;
  double tau_ = 0.0;
  std::vector<double> tquad_x, tquad_w;
  std::vector<VolumeTables> volumes_;
  std::vector<FaceTables> faces_;
};

// One-shot wrappers around SlabAssembler.
std::vector<double> assemble_residual(const STDGSpace& space, const ModelProblem& problem,
                                      const std::vector<double>& w,
                                      const std::vector<double>& prev_trace, double tau,
                                      double slab_start = 0.0);
BlockSparseMatrix assemble_jacobian(const STDGSpace& space, const ModelProblem& problem,
                                    const std::vector<double>& w, double tau,
                                    double slab_start = 0.0);

}  // namespace addm

#endif
