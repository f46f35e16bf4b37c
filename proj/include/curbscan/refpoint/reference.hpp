#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "curbscan/core/error.hpp"
#include "curbscan/core/geom2d.hpp"
#include "curbscan/core/types.hpp"
#include "curbscan/refpoint/sblf.hpp"

namespace curbscan::refpoint {

/// Top-down separator lines, normalized; the left flare sits on the negative
/// side of `left`, the right flare on the positive side of `right`, the
/// center ramp on the positive side of `bottom`.
struct Separators {
  Line2 left;
  Line2 right;
  Line2 bottom;
};

/// The six labeled corners: P1..P4 are the center-ramp corners (bottom-left,
/// bottom-right, top-left, top-right); P5/P6 the left/right flare outer
/// corners. P1-P4 keep their exact intersection xy (so they stay on the hull
/// boundary) and take z from the nearest cloud point; P5/P6 are cloud members.
struct ReferencePoints {
  std::array<Point3, 6> p{};

  [[nodiscard]] const Point3& P(int k) const { return p[static_cast<std::size_t>(k - 1)]; }
  [[nodiscard]] Point3& P(int k) { return p[static_cast<std::size_t>(k - 1)]; }
};

namespace detail {

inline std::vector<Vec2> to_xy(const std::vector<Point3>& pts) {
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(p.xy());
  return out;
}

inline Vec2 centroid_xy(const std::vector<Point3>& pts) {
  Vec2 c{0.0, 0.0};
  for (const auto& p : pts) c += p.xy();
  return pts.empty() ? c : Vec2{c / static_cast<double>(pts.size())};
}

/// z of the 2D-nearest cloud point (ties by lowest index).
inline double lift_z(const std::vector<Point3>& cloud, const Vec2& q) {
  if (cloud.empty()) raise(ErrorCode::EmptyCloud, "z-lift: empty snap cloud");
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double d = (cloud[i].xy() - q).squaredNorm();
    if (d < best) {
      best = d;
      best_i = i;
    }
  }
  return cloud[best_i].z;
}

}  // namespace detail

/// l = (l_f + l_m)/2: SBLF with flare-side candidates averaged with SBLF
/// with center-side candidates, orientation-aligned first.
inline Line2 fit_separator(const std::vector<Vec2>& flare,
                           const std::vector<Vec2>& center,
                           std::size_t cap = kSblfDefaultCap,
                           std::uint64_t seed = 0) {
  const Line2 lf = sblf(flare, center, flare, cap, seed);
  const Line2 lm = sblf(flare, center, center, cap, seed);
  return aligned_average(lf, lm);
}

/// Bottom separator between the center ramp and the street below it:
/// A = center points, B = unassigned points strictly between the (oriented)
/// left/right separators; both restricted to z below the center centroid
/// height. Returns the aligned average of sblf(A,B,A) and sblf(A,B,B),
/// oriented so the center ramp lies on the positive side.
inline Line2 fit_bottom_line(const std::vector<Point3>& center,
                             const std::vector<Point3>& unassigned,
                             const Line2& left, const Line2& right,
                             std::size_t cap = kSblfDefaultCap,
                             std::uint64_t seed = 0) {
  if (center.empty()) raise(ErrorCode::InvalidParam, "fit_bottom_line: empty center");
  double zbar = 0.0;
  for (const auto& p : center) zbar += p.z;
  zbar /= static_cast<double>(center.size());

  const Line2 ln = left.normalized();
  const Line2 rn = right.normalized();
  std::vector<Vec2> a2, b2;
  for (const auto& p : center)
    if (p.z < zbar) a2.push_back(p.xy());
  std::size_t between = 0;
  for (const auto& p : unassigned) {
    const Vec2 q = p.xy();
    if (ln.eval(q) > 0.0 && rn.eval(q) < 0.0) {
      ++between;
      if (p.z < zbar) b2.push_back(q);
    }
  }
  if (a2.empty())
    raise(ErrorCode::DegenerateFilter,
          "fit_bottom_line: centroid-height filter removed all center points");
  if (between == 0 || b2.empty())
    raise(ErrorCode::EmptyRegion,
          "fit_bottom_line: no unassigned points between separators below the "
          "centroid height");

  const Line2 la = sblf(a2, b2, a2, cap, seed);
  const Line2 lb = sblf(a2, b2, b2, cap, seed);
  Line2 bottom = aligned_average(la, lb);
  // orientation convention: center side positive
  double mean_eval = 0.0;
  for (const Vec2& q : a2) mean_eval += bottom.eval(q);
  if (mean_eval < 0.0) bottom = bottom.flipped();
  return bottom;
}

/// Intersections of one infinite line with the boundary of a convex polygon
/// (CCW vertices). A vertex lying on the line counts once. Exactly two
/// crossings are required.
inline std::array<Vec2, 2> hull_line_crossings(const std::vector<Vec2>& hull,
                                               const Line2& line,
                                               const std::string& which) {
  if (hull.size() < 3)
    raise(ErrorCode::DegenerateGeometry, "hull_line_crossings: degenerate hull");
  const Line2 l = line.normalized();
  constexpr double kOnTol = 1e-9;
  std::vector<Vec2> hits;
  const std::size_t n = hull.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& v0 = hull[i];
    const Vec2& v1 = hull[(i + 1) % n];
    const double e0 = l.eval(v0);
    const double e1 = l.eval(v1);
    if (std::abs(e0) <= kOnTol) {
      hits.push_back(v0);  // vertex on the line; v1's turn comes next edge
    } else if ((e0 < 0.0 && e1 > kOnTol) || (e0 > 0.0 && e1 < -kOnTol)) {
      const double t = e0 / (e0 - e1);
      hits.push_back(v0 + t * (v1 - v0));
    }
  }
  if (hits.size() != 2)
    raise(ErrorCode::NoIntersection,
          which + " separator crosses the hull " + std::to_string(hits.size()) +
              " times (need exactly 2)");
  return {hits[0], hits[1]};
}

/// Hull crossings of both separators: [left0, left1, right0, right1].
inline std::array<Vec2, 4> corner_points(const std::vector<Vec2>& hull,
                                         const Separators& seps) {
  const auto lc = hull_line_crossings(hull, seps.left, "left");
  const auto rc = hull_line_crossings(hull, seps.right, "right");
  return {lc[0], lc[1], rc[0], rc[1]};
}

/// Flare point with maximum absolute 2D distance to the separator (ties by
/// lowest index). The returned point is a member of `flare`.
inline Point3 flare_outer_corner(const std::vector<Point3>& flare, const Line2& sep) {
  if (flare.empty()) raise(ErrorCode::InvalidParam, "flare_outer_corner: empty flare");
  const Line2 l = sep.normalized();
  double best = -1.0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < flare.size(); ++i) {
    const double d = std::abs(l.eval(flare[i].xy()));
    if (d > best) {
      best = d;
      best_i = i;
    }
  }
  return flare[best_i];
}

/// Applies the orientation conventions in place: flips `left` so the left
/// flare centroid has negative signed distance, `right` so the right flare
/// centroid has positive signed distance, and normalizes both.
inline void orient_separators(Separators& seps, const Vec2& left_flare_centroid,
                              const Vec2& right_flare_centroid) {
  seps.left = seps.left.normalized();
  seps.right = seps.right.normalized();
  if (seps.left.eval(left_flare_centroid) > 0.0) seps.left = seps.left.flipped();
  if (seps.right.eval(right_flare_centroid) < 0.0) seps.right = seps.right.flipped();
}

/// Orders the four hull crossings into P1..P4 along the ramp's up axis
/// (mean of the two separator directions, normals rotated 90 deg CCW),
/// attaches the flare corners as P5/P6, and lifts P1..P4 onto the cloud:
/// xy is kept exactly (hull membership), z comes from the 2D-nearest point
/// of `snap_cloud`.
inline ReferencePoints orient_and_order(const std::array<Vec2, 4>& crossings,
                                        const Point3& left_flare_corner,
                                        const Point3& right_flare_corner,
                                        const Separators& seps,
                                        const std::vector<Point3>& snap_cloud) {
  const Line2 ln = seps.left.normalized();
  const Line2 rn = seps.right.normalized();
  const Vec2 ul = Vec2{-ln.b, ln.a};
  const Vec2 ur = Vec2{-rn.b, rn.a};
  Vec2 up = ul + ur;
  if (up.norm() < 1e-9)
    raise(ErrorCode::DegenerateAxis, "separator directions cancel; no up axis");
  up.normalize();

  Vec2 mean{0.0, 0.0};
  for (const Vec2& q : crossings) mean += q;
  mean /= 4.0;
  std::array<double, 4> s{};
  for (int k = 0; k < 4; ++k) s[static_cast<std::size_t>(k)] = (crossings[static_cast<std::size_t>(k)] - mean).dot(up);

  // crossings: [left0, left1, right0, right1]
  const bool left_first_top = s[0] > s[1];
  const bool right_first_top = s[2] > s[3];
  const Vec2& pl_bot = crossings[left_first_top ? 1 : 0];
  const Vec2& pl_top = crossings[left_first_top ? 0 : 1];
  const Vec2& pr_bot = crossings[right_first_top ? 3 : 2];
  const Vec2& pr_top = crossings[right_first_top ? 2 : 3];
  const double s_bot_max = std::max(std::min(s[0], s[1]), std::min(s[2], s[3]));
  const double s_top_min = std::min(std::max(s[0], s[1]), std::max(s[2], s[3]));
  if (!(s_top_min > s_bot_max))
    raise(ErrorCode::DegenerateGeometry,
          "top/bottom corner ordering is ambiguous along the up axis");

  auto lifted = [&](const Vec2& q) {
    Point3 p;
    p.x = q.x();
    p.y = q.y();
    p.z = detail::lift_z(snap_cloud, q);
    return p;
  };
  ReferencePoints out;
  out.p[0] = lifted(pl_bot);
  out.p[1] = lifted(pr_bot);
  out.p[2] = lifted(pl_top);
  out.p[3] = lifted(pr_top);
  out.p[4] = left_flare_corner;
  out.p[5] = right_flare_corner;
  return out;
}

}  // namespace curbscan::refpoint
