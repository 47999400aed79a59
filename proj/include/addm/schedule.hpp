#ifndef ADDM_SCHEDULE_HPP
#define ADDM_SCHEDULE_HPP

#include "addm/mesh.hpp"

namespace addm {

// Synthetic per-step mesh adaptation: a disc-shaped feature travels across
// the domain; elements it touches are refined to a target depth, everything
// else stays at (or returns to) the base level. Every produced mesh descends
// from the same base mesh, so transfer between consecutive meshes is exact.
class AdaptSchedule {
 public:
  struct Params {
    int nx = 4, ny = 4;
    Rect domain;
    int degree = 1;
    Point2 disc_start{0.25, 0.5};
    Point2 disc_velocity{0.05, 0.0};  // displacement per step
    double disc_radius = 0.15;
    int target_depth = 2;
    double growth_per_step = 0.0;     // optional radius growth per step
  };

  explicit AdaptSchedule(const Params& params);

  const Params& params() const { return params_; }
  const TriMesh& base() const { return base_; }
  Point2 disc_center(int step) const;
  double disc_radius(int step) const;

  // Mesh for the given step. Rebuilt from the base mesh, which realizes the
  // coarsening rule: elements the disc has left fall back to the base level.
  TriMesh mesh_for_step(int step) const;

  // Returns the mesh for `step` and whether it differs from `current`.
  // When unchanged, `current` is returned so meshes are reused across steps.
  std::pair<TriMesh, bool> next_mesh(int step, const TriMesh& current) const;

 private:
  Params params_;
  TriMesh base_;
};

bool same_mesh_structure(const TriMesh& a, const TriMesh& b);

}  // namespace addm

#endif
