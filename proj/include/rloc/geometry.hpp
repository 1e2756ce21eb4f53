#pragma once

#include <cmath>
#include <optional>
#include <vector>

namespace rloc {

/// Planar location in meters.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Mirror image of `p` across the infinite line through `a` and `b` (a != b).
inline Point2 reflect_across_line(Point2 p, Point2 a, Point2 b) {
  const Point2 d = b - a;
  const double t = dot(p - a, d) / dot(d, d);
  const Point2 foot = a + t * d;
  return 2.0 * foot - p;
}

/// Perpendicular distance from `p` to the infinite line through `a` and `b`.
inline double line_distance(Point2 p, Point2 a, Point2 b) {
  return std::abs(cross(b - a, p - a)) / distance(a, b);
}

/// Partial vertex -> location assignment; index is the vertex id.
using LocationMap = std::vector<std::optional<Point2>>;

}  // namespace rloc
