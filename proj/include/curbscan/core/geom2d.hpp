#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "curbscan/core/types.hpp"

namespace curbscan {

/// Normalized line through two distinct 2D points.
inline Line2 line_through(const Vec2& p, const Vec2& q) {
  const Vec2 d = q - p;
  if (d.norm() < 1e-12)
    raise(ErrorCode::DegenerateGeometry, "line through coincident points");
  // normal is the left-hand perpendicular of the direction
  Line2 l{-d.y(), d.x(), 0.0};
  l.c = -(l.a * p.x() + l.b * p.y());
  return l.normalized();
}

/// Intersection of two (normalized or not) lines; nullopt when parallel.
inline std::optional<Vec2> intersect_lines(const Line2& l1, const Line2& l2) {
  const double det = l1.a * l2.b - l2.a * l1.b;
  if (std::abs(det) < 1e-12) return std::nullopt;
  const double x = (l1.b * l2.c - l2.b * l1.c) / det;
  const double y = (l2.a * l1.c - l1.a * l2.c) / det;
  return Vec2{x, y};
}

inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Signed area of a simple polygon (positive when counter-clockwise).
inline double polygon_signed_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    s += cross2(p, q);
  }
  return 0.5 * s;
}

inline double polygon_area(const std::vector<Vec2>& poly) {
  return std::abs(polygon_signed_area(poly));
}

/// Even-odd point-in-polygon test (boundary points count as inside
/// up to floating slack; callers needing exact boundary semantics
/// should test distance separately).
inline bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    const bool straddles = (a.y() > p.y()) != (b.y() > p.y());
    if (straddles) {
      const double x_at = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < x_at) in = !in;
    }
  }
  return in;
}

/// True when segments ab and cd cross at a single interior point of both.
inline bool segments_properly_intersect(const Vec2& a, const Vec2& b,
                                        const Vec2& c, const Vec2& d) {
  const double d1 = cross2(b - a, c - a);
  const double d2 = cross2(b - a, d - a);
  const double d3 = cross2(d - c, a - c);
  const double d4 = cross2(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) &&
         d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

/// Distance from p to segment [a, b] in 2D.
inline double point_segment_distance2(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 < 1e-300) return (p - a).norm();
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

/// Distance from p to segment [a, b] in 3D.
inline double point_segment_distance3(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 < 1e-300) return (p - a).norm();
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

/// Planar rigid transform: rotation by theta (radians) about the origin,
/// then translation; z shifts by tz.
struct RigidXY {
  double cos_t = 1.0;
  double sin_t = 0.0;
  double tx = 0.0;
  double ty = 0.0;
  double tz = 0.0;

  static RigidXY from_degrees(double deg, double tx, double ty, double tz) {
    const double r = deg * M_PI / 180.0;
    return RigidXY{std::cos(r), std::sin(r), tx, ty, tz};
  }

  [[nodiscard]] Vec2 apply(const Vec2& p) const {
    return {cos_t * p.x() - sin_t * p.y() + tx,
            sin_t * p.x() + cos_t * p.y() + ty};
  }
  [[nodiscard]] Vec3 apply(const Vec3& p) const {
    const Vec2 q = apply(Vec2{p.x(), p.y()});
    return {q.x(), q.y(), p.z() + tz};
  }
  [[nodiscard]] Point3 apply(const Point3& p) const {
    const Vec3 q = apply(p.pos());
    return {q.x(), q.y(), q.z(), p.intensity};
  }
  /// Transform of a line under the same map (normals rotate, offsets shift).
  [[nodiscard]] Line2 apply(const Line2& l) const {
    Line2 out;
    out.a = cos_t * l.a - sin_t * l.b;
    out.b = sin_t * l.a + cos_t * l.b;
    out.c = l.c - (out.a * tx + out.b * ty);
    return out;
  }
};

}  // namespace curbscan
