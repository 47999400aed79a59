#include "addm/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "addm/errors.hpp"
#include "addm/quadrature.hpp"

namespace addm {

void ModelProblem::validate() const {
  if (!(viscosity > 0.0)) throw ConfigError("ModelProblem: viscosity must be positive");
  if (!(penalty_constant > 0.0)) throw ConfigError("ModelProblem: penalty constant must be positive");
}

namespace {

struct FluxLinearization {
  double value = 0.0;
  double d_minus = 0.0;
  double d_plus = 0.0;
};

// Local Lax-Friedrichs flux through a face with unit normal n for the
// direction-symmetric flux F(u) = (f(u), f(u)).
FluxLinearization llf_flux(const ModelProblem& pb, double um, double up, Point2 n) {
  const double sn = n.x + n.y;
  const double asn = std::abs(sn);
  const double fm = pb.flux_deriv(um);
  const double fp = pb.flux_deriv(up);
  const double lambda = asn * std::max(std::abs(fm), std::abs(fp));
  FluxLinearization out;
  out.value = 0.5 * (pb.flux_value(um) + pb.flux_value(up)) * sn + 0.5 * lambda * (um - up);
  const double fpp = pb.flux_second_deriv();
  auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  double dlm = 0.0, dlp = 0.0;
  if (std::abs(fm) >= std::abs(fp)) {
    dlm = asn * sgn(fm) * fpp;
  } else {
    dlp = asn * sgn(fp) * fpp;
  }
  out.d_minus = 0.5 * fm * sn + 0.5 * lambda + 0.5 * dlm * (um - up);
  out.d_plus = 0.5 * fp * sn - 0.5 * lambda + 0.5 * dlp * (um - up);
  return out;
}

}  // namespace

SlabAssembler::SlabAssembler(const STDGSpace& space, const ModelProblem& problem,
                             double slab_start, double tau)
    : space_(&space), problem_(&problem), t0_(slab_start), tau_(tau) {
  problem.validate();
  if (!(tau > 0.0)) throw ConfigError("SlabAssembler: tau must be positive");
  if (space.components() != 1) throw ConfigError("SlabAssembler: scalar spaces only");

  const TriMesh& mesh = space.mesh();
  const int q = space.temporal_degree();

  for (const auto& g : gauss_legendre_unit(q + 3)) {
    tquad_x.push_back(g.x);
    tquad_w.push_back(g.w);
  }

  // Volume tables.
  volumes_.resize(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& basis = space.element_basis(k);
    const int d = basis.dim();
    auto rule = triangle_rule(mesh.triangle(k), 2 * basis.degree() + q + 2);
    auto& vt = volumes_[k];
    const int np = static_cast<int>(rule.size());
    vt.phi = Mat(np, d);
    vt.dphix = Mat(np, d);
    vt.dphiy = Mat(np, d);
    vt.weights.resize(np);
    vt.points.resize(np);
    std::vector<double> val(d), dx(d), dy(d);
    for (int p = 0; p < np; ++p) {
      vt.weights[p] = rule[p].w;
      vt.points[p] = rule[p].p;
      basis.values(rule[p].p, val.data());
      basis.gradients(rule[p].p, dx.data(), dy.data());
      for (int i = 0; i < d; ++i) {
        vt.phi(p, i) = val[i];
        vt.dphix(p, i) = dx[i];
        vt.dphiy(p, i) = dy[i];
      }
    }
  }

  // Face tables: one per interior edge, one per Dirichlet boundary edge,
  // one per periodic boundary pair.
  std::vector<PeriodicPair> pairs;
  std::vector<int> partner_of;
  if (problem.boundary == ModelProblem::Boundary::periodic) {
    pairs = periodic_pairs(mesh);
    partner_of.assign(mesh.edges().size(), -1);
    for (const auto& pr : pairs) partner_of[pr.edge] = pr.partner;
  }

  auto side_tables = [&](int elem, const std::vector<Point2>& pts, FaceSide& side) {
    side.elem = elem;
    const auto& basis = space.element_basis(elem);
    const int d = basis.dim();
    const int np = static_cast<int>(pts.size());
    side.phi = Mat(np, d);
    side.dphix = Mat(np, d);
    side.dphiy = Mat(np, d);
    std::vector<double> val(d), dx(d), dy(d);
    for (int p = 0; p < np; ++p) {
      basis.values(pts[p], val.data());
      basis.gradients(pts[p], dx.data(), dy.data());
      for (int i = 0; i < d; ++i) {
        side.phi(p, i) = val[i];
        side.dphix(p, i) = dx[i];
        side.dphiy(p, i) = dy[i];
      }
    }
  };

  const auto& edges = mesh.edges();
  for (std::size_t eid = 0; eid < edges.size(); ++eid) {
    const auto& e = edges[eid];
    const bool boundary = (e.elem[1] == -1);
    int partner_edge = -1;
    Point2 offset{0.0, 0.0};
    if (boundary && problem.boundary == ModelProblem::Boundary::periodic) {
      partner_edge = partner_of[eid];
      if (static_cast<int>(eid) > partner_edge) continue;  // each pair assembled once
      const auto& pr = *std::find_if(pairs.begin(), pairs.end(),
                                     [&](const PeriodicPair& p) { return p.edge == (int)eid; });
      offset = pr.offset;
    }

    const int km = e.elem[0];
    // Oriented edge as it appears in the minus element (CCW order).
    int le = 0;
    for (; le < 3; ++le) {
      int a = mesh.triangles[km][le];
      int b = mesh.triangles[km][(le + 1) % 3];
      if (std::min(a, b) == e.v0 && std::max(a, b) == e.v1) break;
    }
    const Point2 pa = mesh.vertices[mesh.triangles[km][le]];
    const Point2 pb = mesh.vertices[mesh.triangles[km][(le + 1) % 3]];
    const double len = norm(pb - pa);
    const Point2 normal{(pb.y - pa.y) / len, -(pb.x - pa.x) / len};

    int kp = e.elem[1];
    if (partner_edge >= 0) kp = edges[partner_edge].elem[0];

    const int pm = mesh.degree[km];
    const int pp = kp >= 0 ? mesh.degree[kp] : pm;
    const int pmax = std::max(pm, pp);

    FaceTables ft;
    ft.normal = normal;
    ft.sigma = problem.penalty_constant * pmax * pmax / len;
    auto rule = segment_rule(pa, pb, 2 * pmax + q + 2);
    const int np = static_cast<int>(rule.size());
    ft.weights.resize(np);
    ft.points.resize(np);
    for (int p = 0; p < np; ++p) {
      ft.weights[p] = rule[p].w;
      ft.points[p] = rule[p].p;
    }
    side_tables(km, ft.points, ft.minus);
    if (kp >= 0) {
      std::vector<Point2> plus_pts = ft.points;
      if (partner_edge >= 0)
        for (auto& p : plus_pts) p = p + offset;
      side_tables(kp, plus_pts, ft.plus);
    }
    faces_.push_back(std::move(ft));
  }
}

void SlabAssembler::spatial_state(const std::vector<double>& w, const std::vector<double>& theta,
                                  std::vector<double>& v) const {
  const STDGSpace& sp = *space_;
  const int q = sp.temporal_degree();
  v.assign(sp.spatial_dim(), 0.0);
  for (int k = 0; k < sp.mesh().num_elements(); ++k) {
    const int d = sp.element_basis(k).dim();
    const long long boff = sp.block_offset(k);
    const long long soff = sp.spatial_offset(k);
    for (int j = 0; j <= q; ++j) {
      const double tj = theta[j];
      for (int i = 0; i < d; ++i) v[soff + i] += tj * w[boff + sp.local_index(k, j, i)];
    }
  }
}

std::vector<double> SlabAssembler::residual(const std::vector<double>& w,
                                            const std::vector<double>& prev_trace) const {
  const STDGSpace& sp = *space_;
  if (static_cast<long long>(w.size()) != sp.dim())
    throw ConfigError("residual: coefficient vector has wrong dimension");
  if (static_cast<long long>(prev_trace.size()) != sp.spatial_dim())
    throw ConfigError("residual: previous-trace vector has wrong dimension");

  const int q = sp.temporal_degree();
  const auto& th0 = sp.temporal_basis().values_at_zero();
  const Mat& dmat = sp.temporal_basis().derivative_matrix();

  std::vector<double> r(sp.dim(), 0.0);

  // Temporal derivative and time-penalty jump (analytic in time, spatial
  // mass is the identity in the orthonormal basis).
  for (int k = 0; k < sp.mesh().num_elements(); ++k) {
    const int d = sp.element_basis(k).dim();
    const long long boff = sp.block_offset(k);
    const long long soff = sp.spatial_offset(k);
    for (int jt = 0; jt <= q; ++jt) {
      for (int j = 0; j <= q; ++j) {
        const double c = dmat(jt, j) + th0[jt] * th0[j];
        if (c == 0.0) continue;
        for (int i = 0; i < d; ++i)
          r[boff + sp.local_index(k, jt, i)] += c * w[boff + sp.local_index(k, j, i)];
      }
      for (int i = 0; i < d; ++i)
        r[boff + sp.local_index(k, jt, i)] -= th0[jt] * prev_trace[soff + i];
    }
  }

  std::vector<double> v;
  std::vector<double> rs(sp.spatial_dim());
  const ModelProblem& pb = *problem_;
  const double eps = pb.viscosity;

  for (std::size_t tq = 0; tq < tquad_x.size(); ++tq) {
    const double t = t0_ + tau_ * tquad_x[tq];
    const auto theta = sp.temporal_basis().values(tquad_x[tq]);
    spatial_state(w, theta, v);
    std::fill(rs.begin(), rs.end(), 0.0);

    // Volume terms.
    for (int k = 0; k < sp.mesh().num_elements(); ++k) {
      const auto& vt = volumes_[k];
      const int d = sp.element_basis(k).dim();
      const long long soff = sp.spatial_offset(k);
      for (std::size_t p = 0; p < vt.weights.size(); ++p) {
        double u = 0.0, ux = 0.0, uy = 0.0;
        for (int i = 0; i < d; ++i) {
          const double ci = v[soff + i];
          u += ci * vt.phi(p, i);
          ux += ci * vt.dphix(p, i);
          uy += ci * vt.dphiy(p, i);
        }
        const double fu = pb.flux_value(u);
        const double g = pb.source_value(vt.points[p], t);
        const double wt = vt.weights[p];
        for (int i = 0; i < d; ++i) {
          rs[soff + i] += wt * (eps * (ux * vt.dphix(p, i) + uy * vt.dphiy(p, i)) -
                                fu * (vt.dphix(p, i) + vt.dphiy(p, i)) - g * vt.phi(p, i));
        }
      }
    }

    // Face terms.
    for (const auto& ft : faces_) {
      const int km = ft.minus.elem;
      const int dm = sp.element_basis(km).dim();
      const long long som = sp.spatial_offset(km);
      const bool interior = ft.plus.elem >= 0;
      const int kp = ft.plus.elem;
      const int dp = interior ? sp.element_basis(kp).dim() : 0;
      const long long sop = interior ? sp.spatial_offset(kp) : 0;

      for (std::size_t p = 0; p < ft.weights.size(); ++p) {
        double um = 0.0, umx = 0.0, umy = 0.0;
        for (int i = 0; i < dm; ++i) {
          const double ci = v[som + i];
          um += ci * ft.minus.phi(p, i);
          umx += ci * ft.minus.dphix(p, i);
          umy += ci * ft.minus.dphiy(p, i);
        }
        const double wt = ft.weights[p];
        const Point2 n = ft.normal;

        if (interior) {
          double up = 0.0, upx = 0.0, upy = 0.0;
          for (int i = 0; i < dp; ++i) {
            const double ci = v[sop + i];
            up += ci * ft.plus.phi(p, i);
            upx += ci * ft.plus.dphix(p, i);
            upy += ci * ft.plus.dphiy(p, i);
          }
          const auto H = llf_flux(pb, um, up, n);
          const double jump = um - up;
          const double avg_dn = 0.5 * eps * ((umx + upx) * n.x + (umy + upy) * n.y);
          for (int i = 0; i < dm; ++i) {
            const double dn = ft.minus.dphix(p, i) * n.x + ft.minus.dphiy(p, i) * n.y;
            rs[som + i] += wt * (H.value * ft.minus.phi(p, i) - avg_dn * ft.minus.phi(p, i) -
                                 0.5 * eps * dn * jump + ft.sigma * jump * ft.minus.phi(p, i));
          }
          for (int i = 0; i < dp; ++i) {
            const double dn = ft.plus.dphix(p, i) * n.x + ft.plus.dphiy(p, i) * n.y;
            rs[sop + i] += wt * (-H.value * ft.plus.phi(p, i) + avg_dn * ft.plus.phi(p, i) -
                                 0.5 * eps * dn * jump - ft.sigma * jump * ft.plus.phi(p, i));
          }
        } else {
          const double ud = pb.boundary_value(ft.points[p], t);
          const auto H = llf_flux(pb, um, ud, n);
          const double jump = um - ud;
          const double dnu = eps * (umx * n.x + umy * n.y);
          for (int i = 0; i < dm; ++i) {
            const double dn = ft.minus.dphix(p, i) * n.x + ft.minus.dphiy(p, i) * n.y;
            rs[som + i] += wt * (H.value * ft.minus.phi(p, i) - dnu * ft.minus.phi(p, i) -
                                 eps * dn * jump + ft.sigma * jump * ft.minus.phi(p, i));
          }
        }
      }
    }

    // Scatter the spatial residual over the temporal test modes.
    const double scale = tau_ * tquad_w[tq];
    for (int k = 0; k < sp.mesh().num_elements(); ++k) {
      const int d = sp.element_basis(k).dim();
      const long long boff = sp.block_offset(k);
      const long long soff = sp.spatial_offset(k);
      for (int jt = 0; jt <= q; ++jt) {
        const double c = scale * theta[jt];
        for (int i = 0; i < d; ++i) r[boff + sp.local_index(k, jt, i)] += c * rs[soff + i];
      }
    }
  }
  return r;
}

BlockSparseMatrix SlabAssembler::jacobian(const std::vector<double>& w) const {
  const STDGSpace& sp = *space_;
  if (static_cast<long long>(w.size()) != sp.dim())
    throw ConfigError("jacobian: coefficient vector has wrong dimension");

  const int q = sp.temporal_degree();
  const auto& th0 = sp.temporal_basis().values_at_zero();
  const Mat& dmat = sp.temporal_basis().derivative_matrix();
  const ModelProblem& pb = *problem_;
  const double eps = pb.viscosity;
  const int nt = sp.mesh().num_elements();

  std::vector<int> sizes(nt);
  for (int k = 0; k < nt; ++k) sizes[k] = sp.block_size(k);
  BlockSparseMatrix a(std::move(sizes));

  // Temporal mass/jump blocks on the diagonal.
  for (int k = 0; k < nt; ++k) {
    Mat& blk = a.block(k, k);
    const int d = sp.element_basis(k).dim();
    for (int jt = 0; jt <= q; ++jt)
      for (int j = 0; j <= q; ++j) {
        const double c = dmat(jt, j) + th0[jt] * th0[j];
        if (c == 0.0) continue;
        for (int i = 0; i < d; ++i) blk(sp.local_index(k, jt, i), sp.local_index(k, j, i)) += c;
      }
  }
  // Materialize the edge-neighbor sparsity.
  for (const auto& ft : faces_) {
    if (ft.plus.elem >= 0) {
      a.block(ft.minus.elem, ft.plus.elem);
      a.block(ft.plus.elem, ft.minus.elem);
      a.block(ft.plus.elem, ft.plus.elem);
    }
  }

  std::vector<double> v;
  // Scatter helper: local spatialized matrix into the space-time block.
  auto scatter = [&](int kr, int kc, const Mat& loc, const std::vector<double>& theta,
                     double scale) {
    Mat& blk = a.block(kr, kc);
    const int dr = sp.element_basis(kr).dim();
    const int dc = sp.element_basis(kc).dim();
    for (int jt = 0; jt <= q; ++jt)
      for (int j = 0; j <= q; ++j) {
        const double c = scale * theta[jt] * theta[j];
        for (int ir = 0; ir < dr; ++ir)
          for (int ic = 0; ic < dc; ++ic)
            blk(sp.local_index(kr, jt, ir), sp.local_index(kc, j, ic)) += c * loc(ir, ic);
      }
  };

  for (std::size_t tq = 0; tq < tquad_x.size(); ++tq) {
    const double t = t0_ + tau_ * tquad_x[tq];
    const auto theta = sp.temporal_basis().values(tquad_x[tq]);
    spatial_state(w, theta, v);
    const double scale = tau_ * tquad_w[tq];

    for (int k = 0; k < nt; ++k) {
      const auto& vt = volumes_[k];
      const int d = sp.element_basis(k).dim();
      const long long soff = sp.spatial_offset(k);
      Mat loc(d, d);
      for (std::size_t p = 0; p < vt.weights.size(); ++p) {
        double u = 0.0;
        for (int i = 0; i < d; ++i) u += v[soff + i] * vt.phi(p, i);
        const double fp = pb.flux_deriv(u);
        const double wt = vt.weights[p];
        for (int it = 0; it < d; ++it) {
          const double gx = vt.dphix(p, it), gy = vt.dphiy(p, it);
          for (int ic = 0; ic < d; ++ic) {
            loc(it, ic) += wt * (eps * (gx * vt.dphix(p, ic) + gy * vt.dphiy(p, ic)) -
                                 fp * vt.phi(p, ic) * (gx + gy));
          }
        }
      }
      scatter(k, k, loc, theta, scale);
    }

    for (const auto& ft : faces_) {
      const int km = ft.minus.elem;
      const int dm = sp.element_basis(km).dim();
      const long long som = sp.spatial_offset(km);
      const bool interior = ft.plus.elem >= 0;
      const int kp = ft.plus.elem;
      const int dp = interior ? sp.element_basis(kp).dim() : 0;
      const long long sop = interior ? sp.spatial_offset(kp) : 0;

      Mat mm(dm, dm), mp_(interior ? dm : 0, dp), pm(dp, interior ? dm : 0), pp_(dp, dp);
      for (std::size_t p = 0; p < ft.weights.size(); ++p) {
        double um = 0.0;
        for (int i = 0; i < dm; ++i) um += v[som + i] * ft.minus.phi(p, i);
        const double wt = ft.weights[p];
        const Point2 n = ft.normal;

        if (interior) {
          double up = 0.0;
          for (int i = 0; i < dp; ++i) up += v[sop + i] * ft.plus.phi(p, i);
          const auto H = llf_flux(pb, um, up, n);
          for (int it = 0; it < dm; ++it) {
            const double phit = ft.minus.phi(p, it);
            const double dnt = ft.minus.dphix(p, it) * n.x + ft.minus.dphiy(p, it) * n.y;
            for (int ic = 0; ic < dm; ++ic) {
              const double phic = ft.minus.phi(p, ic);
              const double dnc = ft.minus.dphix(p, ic) * n.x + ft.minus.dphiy(p, ic) * n.y;
              mm(it, ic) += wt * (H.d_minus * phic * phit - 0.5 * eps * dnc * phit -
                                  0.5 * eps * dnt * phic + ft.sigma * phic * phit);
            }
            for (int ic = 0; ic < dp; ++ic) {
              const double phic = ft.plus.phi(p, ic);
              const double dnc = ft.plus.dphix(p, ic) * n.x + ft.plus.dphiy(p, ic) * n.y;
              mp_(it, ic) += wt * (H.d_plus * phic * phit - 0.5 * eps * dnc * phit +
                                   0.5 * eps * dnt * phic - ft.sigma * phic * phit);
            }
          }
          for (int it = 0; it < dp; ++it) {
            const double phit = ft.plus.phi(p, it);
            const double dnt = ft.plus.dphix(p, it) * n.x + ft.plus.dphiy(p, it) * n.y;
            for (int ic = 0; ic < dm; ++ic) {
              const double phic = ft.minus.phi(p, ic);
              const double dnc = ft.minus.dphix(p, ic) * n.x + ft.minus.dphiy(p, ic) * n.y;
              pm(it, ic) += wt * (-H.d_minus * phic * phit + 0.5 * eps * dnc * phit -
                                  0.5 * eps * dnt * phic - ft.sigma * phic * phit);
            }
            for (int ic = 0; ic < dp; ++ic) {
              const double phic = ft.plus.phi(p, ic);
              const double dnc = ft.plus.dphix(p, ic) * n.x + ft.plus.dphiy(p, ic) * n.y;
              pp_(it, ic) += wt * (-H.d_plus * phic * phit + 0.5 * eps * dnc * phit +
                                   0.5 * eps * dnt * phic + ft.sigma * phic * phit);
            }
          }
        } else {
          const double ud = pb.boundary_value(ft.points[p], t);
          const auto H = llf_flux(pb, um, ud, n);
          for (int it = 0; it < dm; ++it) {
            const double phit = ft.minus.phi(p, it);
            const double dnt = ft.minus.dphix(p, it) * n.x + ft.minus.dphiy(p, it) * n.y;
            for (int ic = 0; ic < dm; ++ic) {
              const double phic = ft.minus.phi(p, ic);
              const double dnc = ft.minus.dphix(p, ic) * n.x + ft.minus.dphiy(p, ic) * n.y;
              mm(it, ic) += wt * (H.d_minus * phic * phit - eps * dnc * phit - eps * dnt * phic +
                                  ft.sigma * phic * phit);
            }
          }
        }
      }
      scatter(km, km, mm, theta, scale);
      if (interior) {
        scatter(km, kp, mp_, theta, scale);
        scatter(kp, km, pm, theta, scale);
        scatter(kp, kp, pp_, theta, scale);
      }
    }
  }
  return a;
}

std::vector<double> assemble_residual(const STDGSpace& space, const ModelProblem& problem,
                                      const std::vector<double>& w,
                                      const std::vector<double>& prev_trace, double tau,
                                      double slab_start) {
  return SlabAssembler(space, problem, slab_start, tau).residual(w, prev_trace);
}

BlockSparseMatrix assemble_jacobian(const STDGSpace& space, const ModelProblem& problem,
                                    const std::vector<double>& w, double tau, double slab_start) {
  return SlabAssembler(space, problem, slab_start, tau).jacobian(w);
}

}  // namespace addm
