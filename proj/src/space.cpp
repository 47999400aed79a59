#include "addm/space.hpp"

#include <algorithm>
#include <cmath>

#include "addm/errors.hpp"
#include "addm/schedule.hpp"
#include "addm/quadrature.hpp"

namespace addm {

long long dof_count(const TriMesh& mesh, int temporal_degree, int n_components) {
  if (temporal_degree < 0 || n_components < 1)
    throw ConfigError("dof_count: need q >= 0 and n >= 1");
  long long s = 0;
  for (int k = 0; k < mesh.num_elements(); ++k) s += polynomial_space_dim(mesh.degree[k]);
  return (temporal_degree + 1) * static_cast<long long>(n_components) * s;
}

STDGSpace::STDGSpace(std::shared_ptr<const TriMesh> mesh, int temporal_degree, int n_components)
    : mesh_(std::move(mesh)), q_(temporal_degree), n_(n_components), temporal_(temporal_degree) {
  if (!mesh_) throw ConfigError("STDGSpace: null mesh");
  if (n_ < 1) throw ConfigError("STDGSpace: n >= 1 required");
  const int nt = mesh_->num_elements();
  bases_.reserve(nt);
  block_size_.resize(nt);
  block_offset_.resize(nt);
  spatial_offset_.resize(nt);
  for (int k = 0; k < nt; ++k) {
    bases_.emplace_back(mesh_->triangle(k), mesh_->degree[k]);
    block_offset_[k] = dim_;
    spatial_offset_[k] = spatial_dim_;
    block_size_[k] = (q_ + 1) * n_ * bases_[k].dim();
    dim_ += block_size_[k];
    spatial_dim_ += n_ * bases_[k].dim();
  }
}

std::vector<double> STDGSpace::project_spatial(const std::function<double(Point2)>& f,
                                               int extra_quad_degree) const {
  if (n_ != 1) throw ConfigError("project_spatial: scalar spaces only");
  std::vector<double> out(spatial_dim_, 0.0);
  for (int k = 0; k < mesh_->num_elements(); ++k) {
    const auto& basis = bases_[k];
    const auto quad = triangle_rule(mesh_->triangle(k), 2 * basis.degree() + extra_quad_degree);
    std::vector<double> phi(basis.dim());
    for (const auto& qp : quad) {
      basis.values(qp.p, phi.data());
      const double fv = f(qp.p);
      for (int i = 0; i < basis.dim(); ++i) out[spatial_offset_[k] + i] += qp.w * fv * phi[i];
    }
  }
  return out;
}

std::vector<double> STDGSpace::project(const std::function<double(Point2, double)>& f, double t0,
                                       double tau, int extra_quad_degree) const {
  if (n_ != 1) throw ConfigError("project: scalar spaces only");
  std::vector<double> out(dim_, 0.0);
  const auto trule = interval_rule(2 * q_ + extra_quad_degree);
  for (const auto& tq : trule) {
    const double t = t0 + tau * tq.x;
    const auto theta = temporal_.values(tq.x);
    // Space-time measure tau cancels against the 1/tau of the temporal
    // basis normalization on the slab: coefficients are taken w.r.t. the
    // orthonormal tensor basis on K x [0,1].
    for (int k = 0; k < mesh_->num_elements(); ++k) {
      const auto& basis = bases_[k];
      const auto quad = triangle_rule(mesh_->triangle(k), 2 * basis.degree() + extra_quad_degree);
      std::vector<double> phi(basis.dim());
      for (const auto& qp : quad) {
        basis.values(qp.p, phi.data());
        const double fv = f(qp.p, t);
        for (int j = 0; j <= q_; ++j)
          for (int i = 0; i < basis.dim(); ++i)
            out[block_offset_[k] + local_index(k, j, i)] += tq.w * qp.w * fv * theta[j] * phi[i];
      }
    }
  }
  return out;
}

std::vector<double> STDGSpace::end_value(const std::vector<double>& w) const {
  if (static_cast<long long>(w.size()) != dim_) throw ConfigError("end_value: dimension mismatch");
  std::vector<double> out(spatial_dim_, 0.0);
  const auto& theta1 = temporal_.values_at_one();
  for (int k = 0; k < mesh_->num_elements(); ++k) {
    const int d = bases_[k].dim();
    for (int j = 0; j <= q_; ++j)
      for (int i = 0; i < d; ++i)
        for (int c = 0; c < n_; ++c)
          out[spatial_offset_[k] + i * n_ + c] +=
              theta1[j] * w[block_offset_[k] + local_index(k, j, i, c)];
  }
  return out;
}

double STDGSpace::eval_spatial(const std::vector<double>& coeffs, int k, Point2 x, int c) const {
  const auto& basis = bases_[k];
  std::vector<double> phi(basis.dim());
  basis.values(x, phi.data());
  double s = 0.0;
  for (int i = 0; i < basis.dim(); ++i) s += coeffs[spatial_offset_[k] + i * n_ + c] * phi[i];
  return s;
}

double STDGSpace::spatial_l2_norm(const std::vector<double>& coeffs) const {
  double s = 0.0;
  for (double v : coeffs) s += v * v;
  return std::sqrt(s);
}

std::vector<double> transfer_trace(const STDGSpace& from, const std::vector<double>& old_end_value,
                                   const STDGSpace& to) {
  if (from.components() != 1 || to.components() != 1)
    throw ConfigError("transfer_trace: scalar spaces only");
  if (static_cast<long long>(old_end_value.size()) != from.spatial_dim())
    throw ConfigError("transfer_trace: coefficient size mismatch");
  if (from.mesh().lineage != to.mesh().lineage)
    throw ConfigError("transfer_trace: meshes do not belong to one nested hierarchy");

  if (same_mesh_structure(from.mesh(), to.mesh()) &&
      from.spatial_dim() == to.spatial_dim()) {
    return old_end_value;  // identical spaces: identity on coefficients
  }

  const TriMesh& mo = from.mesh();
  const TriMesh& mn = to.mesh();
  std::vector<double> out(to.spatial_dim(), 0.0);

  // Bounding boxes of the old elements for overlap pre-filtering.
  std::vector<std::array<double, 4>> obox(mo.num_elements());
  for (int k = 0; k < mo.num_elements(); ++k) {
    Triangle t = mo.triangle(k);
    obox[k] = {std::min({t[0].x, t[1].x, t[2].x}), std::min({t[0].y, t[1].y, t[2].y}),
               std::max({t[0].x, t[1].x, t[2].x}), std::max({t[0].y, t[1].y, t[2].y})};
  }

  for (int kn = 0; kn < mn.num_elements(); ++kn) {
    const Triangle tn = mn.triangle(kn);
    const double area_n = signed_area(tn);
    const std::array<double, 4> nbox = {
        std::min({tn[0].x, tn[1].x, tn[2].x}), std::min({tn[0].y, tn[1].y, tn[2].y}),
        std::max({tn[0].x, tn[1].x, tn[2].x}), std::max({tn[0].y, tn[1].y, tn[2].y})};
    const auto& bn = to.element_basis(kn);
    std::vector<double> phin(bn.dim());

    for (int ko = 0; ko < mo.num_elements(); ++ko) {
      if (obox[ko][0] > nbox[2] || obox[ko][2] < nbox[0] || obox[ko][1] > nbox[3] ||
          obox[ko][3] < nbox[1])
        continue;
      const Triangle to_tri = mo.triangle(ko);
      Polygon overlap = clip_polygon_to_triangle({tn[0], tn[1], tn[2]}, to_tri);
      if (overlap.size() < 3) continue;
      const double oa = polygon_area(overlap);
      if (std::abs(oa) < 1e-12 * area_n) continue;

      const auto& bo = from.element_basis(ko);
      std::vector<double> phio(bo.dim());
      const int deg = bn.degree() + bo.degree();
      for (Triangle piece : fan_triangulate(overlap)) {
        if (std::abs(signed_area(piece)) < 1e-14 * area_n) continue;
        if (signed_area(piece) < 0.0) std::swap(piece[1], piece[2]);
        for (const auto& qp : triangle_rule(piece, deg)) {
          bo.values(qp.p, phio.data());
          bn.values(qp.p, phin.data());
          double uval = 0.0;
          for (int i = 0; i < bo.dim(); ++i)
            uval += old_end_value[from.spatial_offset(ko) + i] * phio[i];
          for (int i = 0; i < bn.dim(); ++i)
            out[to.spatial_offset(kn) + i] += qp.w * uval * phin[i];
        }
      }
    }
  }
  return out;
}

}  // namespace addm
