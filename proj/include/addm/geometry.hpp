#ifndef ADDM_GEOMETRY_HPP
#define ADDM_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <vector>

namespace addm {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::sqrt(dot(a, a)); }
inline Point2 midpoint(Point2 a, Point2 b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

using Triangle = std::array<Point2, 3>;

// Signed area (positive for counterclockwise vertex order).
double signed_area(const Triangle& t);
Point2 centroid(const Triangle& t);

// Axis-aligned rectangle.
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

// Convex polygon as a counterclockwise vertex loop.
using Polygon = std::vector<Point2>;

double polygon_area(const Polygon& p);

// Intersection of a convex polygon with a triangle (Sutherland-Hodgman
// clipping against the triangle's three half-planes). The result is convex;
// empty or degenerate overlaps come out with near-zero area.
Polygon clip_polygon_to_triangle(const Polygon& poly, const Triangle& tri);

// Fan triangulation of a convex polygon.
std::vector<Triangle> fan_triangulate(const Polygon& p);

// True if the disc (center, radius) intersects the closed triangle.
bool disc_intersects_triangle(Point2 center, double radius, const Triangle& t);

}  // namespace addm

#endif
