#include "addm/schedule.hpp"

#include "addm/errors.hpp"

namespace addm {

AdaptSchedule::AdaptSchedule(const Params& params)
    : params_(params),
      base_(build_structured_mesh(params.nx, params.ny, params.domain, params.degree)) {
  if (params.target_depth < 0) throw ConfigError("AdaptSchedule: target_depth >= 0 required");
  if (params.disc_radius < 0.0) throw ConfigError("AdaptSchedule: disc_radius >= 0 required");
}

Point2 AdaptSchedule::disc_center(int step) const {
  return params_.disc_start + static_cast<double>(step) * params_.disc_velocity;
}

double AdaptSchedule::disc_radius(int step) const {
  return params_.disc_radius + params_.growth_per_step * step;
}

TriMesh AdaptSchedule::mesh_for_step(int step) const {
  if (step < 0) throw ConfigError("AdaptSchedule: step >= 0 required");
  const Point2 c = disc_center(step);
  const double r = disc_radius(step);
  TriMesh mesh = base_;
  if (r <= 0.0) return mesh;
  for (int depth = 0; depth < params_.target_depth; ++depth) {
    std::vector<int> marked;
    for (int k = 0; k < mesh.num_elements(); ++k)
      if (disc_intersects_triangle(c, r, mesh.triangle(k))) marked.push_back(k);
    if (marked.empty()) break;
    mesh = refine(mesh, marked);
  }
  return mesh;
}

std::pair<TriMesh, bool> AdaptSchedule::next_mesh(int step, const TriMesh& current) const {
  TriMesh produced = mesh_for_step(step);
  if (same_mesh_structure(produced, current)) return {current, false};
  return {std::move(produced), true};
}

bool same_mesh_structure(const TriMesh& a, const TriMesh& b) {
  if (a.num_vertices() != b.num_vertices() || a.num_elements() != b.num_elements())
    return false;
  for (int i = 0; i < a.num_vertices(); ++i)
    if (a.vertices[i].x != b.vertices[i].x || a.vertices[i].y != b.vertices[i].y)
      return false;
  for (int k = 0; k < a.num_elements(); ++k)
    if (a.triangles[k] != b.triangles[k] || a.degree[k] != b.degree[k]) return false;
  return true;
}

}  // namespace addm
