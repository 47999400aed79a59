#include "addm/geometry.hpp"

#include <algorithm>
#include <limits>

namespace addm {

double signed_area(const Triangle& t) {
  return 0.5 * ((t[1].x - t[0].x) * (t[2].y - t[0].y) -
                (t[2].x - t[0].x) * (t[1].y - t[0].y));
}

Point2 centroid(const Triangle& t) {
  return {(t[0].x + t[1].x + t[2].x) / 3.0, (t[0].y + t[1].y + t[2].y) / 3.0};
}

double polygon_area(const Polygon& p) {
  double a = 0.0;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& u = p[i];
    const Point2& v = p[(i + 1) % n];
    a += u.x * v.y - v.x * u.y;
  }
  return 0.5 * a;
}

namespace {

// Clip a convex polygon against the half-plane left of segment a->b.
Polygon clip_halfplane(const Polygon& poly, Point2 a, Point2 b) {
  Polygon out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  auto side = [&](Point2 p) {
    return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  };
  for (std::size_t i = 0; i < n; ++i) {
    Point2 cur = poly[i];
    Point2 nxt = poly[(i + 1) % n];
    double sc = side(cur);
    double sn = side(nxt);
    if (sc >= 0.0) out.push_back(cur);
    if ((sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0)) {
      double t = sc / (sc - sn);
      out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
    }
  }
  return out;
}

}  // namespace

Polygon clip_polygon_to_triangle(const Polygon& poly, const Triangle& tri) {
  Polygon out = poly;
  // Triangle vertices must be counterclockwise for the left-of test.
  Triangle t = tri;
  if (signed_area(t) < 0.0) std::swap(t[1], t[2]);
  for (int e = 0; e < 3 && !out.empty(); ++e) {
    out = clip_halfplane(out, t[e], t[(e + 1) % 3]);
  }
  return out;
}

std::vector<Triangle> fan_triangulate(const Polygon& p) {
  std::vector<Triangle> tris;
  if (p.size() < 3) return tris;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    tris.push_back({p[0], p[i], p[i + 1]});
  }
  return tris;
}

bool disc_intersects_triangle(Point2 c, double radius, const Triangle& t) {
  if (radius < 0.0) return false;
  // Distance from center to the triangle (0 if inside).
  // Inside test via signs against all edges.
  Triangle tt = t;
  if (signed_area(tt) < 0.0) std::swap(tt[1], tt[2]);
  bool inside = true;
  double dist2 = std::numeric_limits<double>::max();
  for (int e = 0; e < 3; ++e) {
    Point2 a = tt[e];
    Point2 b = tt[(e + 1) % 3];
    double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (cross < 0.0) inside = false;
    Point2 ab = b - a;
    double len2 = dot(ab, ab);
    double s = len2 > 0.0 ? std::clamp(dot(c - a, ab) / len2, 0.0, 1.0) : 0.0;
    Point2 proj = a + s * ab;
    dist2 = std::min(dist2, dot(c - proj, c - proj));
  }
  if (inside) return true;
  return dist2 <= radius * radius;
}

}  // namespace addm
