#include "addm/restriction.hpp"

#include <algorithm>
#include <cmath>

#include "addm/errors.hpp"
#include "addm/quadrature.hpp"

namespace addm {

BooleanRestriction subdomain_restriction(const STDGSpace& space, const DecompPlan& plan,
                                         int subdomain) {
  if (subdomain < 0 || subdomain >= plan.num_subdomains)
    throw ConfigError("subdomain_restriction: subdomain index out of range");
  BooleanRestriction r;
  for (int k = 0; k < space.mesh().num_elements(); ++k) {
    if (plan.subdomain_of[k] != subdomain) continue;
    for (int l = 0; l < space.block_size(k); ++l) r.indices.push_back(space.block_offset(k) + l);
  }
  return r;
}

namespace {

// Monomials on a box frame: ((x-cx)/hx)^a ((y-cy)/hy)^b, graded order.
void box_monomials(Point2 x, Point2 center, double hx, double hy, int degree, double* out) {
  const double u = (x.x - center.x) / hx;
  const double v = (x.y - center.y) / hy;
  int idx = 0;
  for (int total = 0; total <= degree; ++total)
    for (int a = total; a >= 0; --a) out[idx++] = std::pow(u, a) * std::pow(v, total - a);
}

}  // namespace

CoarseRestriction build_coarse_restriction(const STDGSpace& space, const DecompPlan& plan) {
  if (plan.splitting < 1)
    throw StateError("build_coarse_restriction: plan carries no coarse split");
  const TriMesh& mesh = space.mesh();
  if (static_cast<int>(plan.coarse_of.size()) != mesh.num_elements())
    throw ConfigError("build_coarse_restriction: plan does not match the mesh");

  CoarseRestriction r0;
  r0.q_ = space.temporal_degree();
  r0.n_ = space.components();
  r0.fine_dim_ = space.dim();
  r0.space_ = &space;
  r0.coarse_of_ = plan.coarse_of;

  const int nc = plan.num_coarse_elements();
  r0.degree_.assign(nc, 0);
  r0.spatial_dim_.assign(nc, 0);
  r0.offset_.assign(nc, 0);
  r0.members_.resize(nc);

  const auto members = plan.coarse_element_members();
  for (int c = 0; c < nc; ++c) {
    if (members[c].empty())
      throw ConfigError("build_coarse_restriction: coarse element " + std::to_string(c) +
                        " is empty");
    int qc = mesh.degree[members[c][0]];
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (int k : members[c]) {
      qc = std::min(qc, mesh.degree[k]);
      for (int lv = 0; lv < 3; ++lv) {
        const Point2& p = mesh.vertices[mesh.triangles[k][lv]];
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
      }
    }
    const Point2 center{0.5 * (x0 + x1), 0.5 * (y0 + y1)};
    const double hx = std::max(0.5 * (x1 - x0), 1e-300);
    const double hy = std::max(0.5 * (y1 - y0), 1e-300);

    r0.degree_[c] = qc;
    const int dc = polynomial_space_dim(qc);
    r0.spatial_dim_[c] = dc;
    r0.offset_[c] = r0.coarse_dim_;
    r0.coarse_dim_ += static_cast<long long>(r0.q_ + 1) * r0.n_ * dc;

    for (int k : members[c]) {
      const auto& basis = space.element_basis(k);
      const int dk = basis.dim();
      Mat s(dc, dk);
      std::vector<double> mono(dc), phi(dk);
      for (const auto& qp : triangle_rule(mesh.triangle(k), qc + basis.degree())) {
        box_monomials(qp.p, center, hx, hy, qc, mono.data());
        basis.values(qp.p, phi.data());
        for (int b = 0; b < dc; ++b)
          for (int i = 0; i < dk; ++i) s(b, i) += qp.w * mono[b] * phi[i];
      }
      r0.members_[c].push_back({k, std::move(s)});
    }
  }
  return r0;
}

void CoarseRestriction::apply(const double* x, double* y) const {
  std::fill(y, y + coarse_dim_, 0.0);
  const STDGSpace& sp = *space_;
  for (int c = 0; c < num_coarse(); ++c) {
    const int dc = spatial_dim_[c];
    for (const auto& mb : members_[c]) {
      const int dk = sp.element_basis(mb.elem).dim();
      const long long foff = sp.block_offset(mb.elem);
      for (int j = 0; j <= q_; ++j)
        for (int b = 0; b < dc; ++b)
          for (int i = 0; i < dk; ++i) {
            const double sv = mb.s(b, i);
            if (sv == 0.0) continue;
            for (int comp = 0; comp < n_; ++comp)
              y[offset_[c] + (static_cast<long long>(j) * dc + b) * n_ + comp] +=
                  sv * x[foff + (static_cast<long long>(j) * dk + i) * n_ + comp];
          }
    }
  }
}

void CoarseRestriction::apply_transpose(const double* y, double* x) const {
  std::fill(x, x + fine_dim_, 0.0);
  const STDGSpace& sp = *space_;
  for (int c = 0; c < num_coarse(); ++c) {
    const int dc = spatial_dim_[c];
    for (const auto& mb : members_[c]) {
      const int dk = sp.element_basis(mb.elem).dim();
      const long long foff = sp.block_offset(mb.elem);
      for (int j = 0; j <= q_; ++j)
        for (int b = 0; b < dc; ++b)
          for (int i = 0; i < dk; ++i) {
            const double sv = mb.s(b, i);
            if (sv == 0.0) continue;
            for (int comp = 0; comp < n_; ++comp)
              x[foff + (static_cast<long long>(j) * dk + i) * n_ + comp] +=
                  sv * y[offset_[c] + (static_cast<long long>(j) * dc + b) * n_ + comp];
          }
    }
  }
}

std::vector<double> CoarseRestriction::apply(const std::vector<double>& x) const {
  std::vector<double> y(coarse_dim_);
  apply(x.data(), y.data());
  return y;
}

std::vector<double> CoarseRestriction::apply_transpose(const std::vector<double>& y) const {
  std::vector<double> x(fine_dim_);
  apply_transpose(y.data(), x.data());
  return x;
}

Mat CoarseRestriction::to_dense() const {
  Mat dense(static_cast<int>(coarse_dim_), static_cast<int>(fine_dim_));
  const STDGSpace& sp = *space_;
  for (int c = 0; c < num_coarse(); ++c) {
    const int dc = spatial_dim_[c];
    for (const auto& mb : members_[c]) {
      const int dk = sp.element_basis(mb.elem).dim();
      const long long foff = sp.block_offset(mb.elem);
      for (int j = 0; j <= q_; ++j)
        for (int b = 0; b < dc; ++b)
          for (int i = 0; i < dk; ++i)
            for (int comp = 0; comp < n_; ++comp)
              dense(static_cast<int>(offset_[c] + (static_cast<long long>(j) * dc + b) * n_ + comp),
                    static_cast<int>(foff + (static_cast<long long>(j) * dk + i) * n_ + comp)) =
                  mb.s(b, i);
    }
  }
  return dense;
}

BlockSparseMatrix galerkin_coarse(const BlockSparseMatrix& a, const CoarseRestriction& r0) {
  const STDGSpace& sp = r0.fine_space();
  if (a.num_block_rows() != sp.mesh().num_elements())
    throw ConfigError("galerkin_coarse: matrix does not match the fine space");

  // Per-element handle on its projection block.
  std::vector<const Mat*> s_of(sp.mesh().num_elements(), nullptr);
  for (int c = 0; c < r0.num_coarse(); ++c)
    for (const auto& mb : r0.members(c)) s_of[mb.elem] = &mb.s;

  std::vector<int> sizes(r0.num_coarse());
  for (int c = 0; c < r0.num_coarse(); ++c) sizes[c] = r0.coarse_block_size(c);
  BlockSparseMatrix a0(std::move(sizes));

  const int q = r0.temporal_degree();
  const int n = r0.components();
  for (int kr = 0; kr < a.num_block_rows(); ++kr) {
    const int cr = r0.coarse_of_element(kr);
    const Mat& sr = *s_of[kr];
    const int dkr = sr.cols(), dcr = sr.rows();
    for (const auto& e : a.row_blocks(kr)) {
      const int cc = r0.coarse_of_element(e.col);
      const Mat& sc = *s_of[e.col];
      const int dkc = sc.cols(), dcc = sc.rows();
      Mat& out = a0.block(cr, cc);
      Mat asub(dkr, dkc), t1(dcr, dkc);
      for (int jt = 0; jt <= q; ++jt)
        for (int ct = 0; ct < n; ++ct)
          for (int j = 0; j <= q; ++j)
            for (int cl = 0; cl < n; ++cl) {
              for (int i = 0; i < dkr; ++i)
                for (int i2 = 0; i2 < dkc; ++i2)
                  asub(i, i2) = e.mat((jt * dkr + i) * n + ct, (j * dkc + i2) * n + cl);
              t1 = sr * asub;
              for (int b = 0; b < dcr; ++b)
                for (int b2 = 0; b2 < dcc; ++b2) {
                  double v = 0.0;
                  for (int i2 = 0; i2 < dkc; ++i2) v += t1(b, i2) * sc(b2, i2);
                  out((jt * dcr + b) * n + ct, (j * dcc + b2) * n + cl) += v;
                }
            }
    }
  }
  return a0;
}

}  // namespace addm
