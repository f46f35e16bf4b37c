#pragma once

#include <algorithm>
#include <vector>

#include "curbscan/core/geom2d.hpp"
#include "curbscan/core/types.hpp"

namespace curbscan::ml {

/// 2D convex hull (Andrew's monotone chain). Returns vertices in
/// counter-clockwise order starting from the lexicographically smallest
/// point; collinear boundary points are excluded (strict turns only).
/// Throws TooFewPoints (< 3 distinct) and DegenerateGeometry (collinear).
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& p, const Vec2& q) {
    return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& p, const Vec2& q) {
                          return p.x() == q.x() && p.y() == q.y();
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) raise(ErrorCode::TooFewPoints, "hull needs >= 3 distinct points");

  std::vector<Vec2> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross2(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper
    while (k >= t && cross2(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);  // last point repeats the first
  if (h.size() < 3)
    raise(ErrorCode::DegenerateGeometry, "hull input is collinear");
  return h;
}

inline std::vector<Vec2> convex_hull_of(const std::vector<Point3>& pts,
                                        const std::vector<int>& idx) {
  std::vector<Vec2> xy;
  xy.reserve(idx.size());
  for (int i : idx) xy.push_back(pts[static_cast<std::size_t>(i)].xy());
  return convex_hull(std::move(xy));
}

}  // namespace curbscan::ml
