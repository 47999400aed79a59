#include "addm/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace addm {

std::vector<QuadPoint1D> gauss_legendre_unit(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_unit: n >= 1 required");
  // Newton iteration on Legendre polynomials over [-1,1], then map to [0,1].
  std::vector<QuadPoint1D> pts(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, p1 = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    p0 = 1.0;
    p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    pts[n - 1 - i] = {0.5 * (x + 1.0), 0.5 * w};
  }
  return pts;
}

std::vector<QuadPoint1D> interval_rule(int degree) {
  int n = degree / 2 + 1;  // 2n-1 >= degree
  static std::map<int, std::vector<QuadPoint1D>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre_unit(n)).first;
  return it->second;
}

std::vector<QuadPoint2D> triangle_rule(const Triangle& t, int degree) {
  // Duffy map from the unit square: (u,v) -> (u, v(1-u)) on the reference
  // triangle, Jacobian (1-u). A degree-d integrand becomes degree d+1 in u
  // and d in v, so exactness needs 2n_u-1 >= d+1 and 2n_v-1 >= d.
  int nu = (degree + 2) / 2 + 1;
  int nv = degree / 2 + 1;
  const auto gu = gauss_legendre_unit(nu);
  const auto gv = gauss_legendre_unit(nv);

  const double area2 = 2.0 * signed_area(t);  // affine map Jacobian
  std::vector<QuadPoint2D> pts;
  pts.reserve(gu.size() * gv.size());
  for (const auto& qu : gu) {
    for (const auto& qv : gv) {
      double r = qu.x;                // reference x
      double s = qv.x * (1.0 - qu.x); // reference y
      Point2 p{t[0].x + r * (t[1].x - t[0].x) + s * (t[2].x - t[0].x),
               t[0].y + r * (t[1].y - t[0].y) + s * (t[2].y - t[0].y)};
      double w = qu.w * qv.w * (1.0 - qu.x) * area2;
      pts.push_back({p, w});
    }
  }
  return pts;
}

std::vector<QuadPoint2D> segment_rule(Point2 a, Point2 b, int degree) {
  const auto g = interval_rule(degree);
  const double len = norm(b - a);
  std::vector<QuadPoint2D> pts;
  pts.reserve(g.size());
  for (const auto& q : g) {
    pts.push_back({{a.x + q.x * (b.x - a.x), a.y + q.x * (b.y - a.y)}, q.w * len});
  }
  return pts;
}

}  // namespace addm
