#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "curbscan/core/types.hpp"

namespace curbscan::ml {

/// Uniform-cell hash grid over 3D points for radius queries. Radius tests are
/// inclusive (||p - q|| <= r). Returned indices are ascending, so downstream
/// consumers are order-deterministic.
class SpatialGrid {
public:
  SpatialGrid() = default;

  SpatialGrid(const std::vector<Point3>& pts, double cell) { build(pts, cell); }

  void build(const std::vector<Point3>& pts, double cell) {
    if (cell <= 0.0) raise(ErrorCode::InvalidParam, "grid cell must be positive");
    pts_ = &pts;
    cell_ = cell;
    cells_.clear();
    cells_.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      cells_[key(pts[i].x, pts[i].y, pts[i].z)].push_back(static_cast<int>(i));
  }

  /// Indices of points within r of q (inclusive), ascending.
  [[nodiscard]] std::vector<int> radius_indices(const Vec3& q, double r) const {
    std::vector<int> out;
    if (!pts_) return out;
    const double r2 = r * r;
    const int span = static_cast<int>(std::ceil(r / cell_));
    const int cx = coord(q.x()), cy = coord(q.y()), cz = coord(q.z());
    for (int dx = -span; dx <= span; ++dx)
      for (int dy = -span; dy <= span; ++dy)
        for (int dz = -span; dz <= span; ++dz) {
          const auto it = cells_.find(pack(cx + dx, cy + dy, cz + dz));
          if (it == cells_.end()) continue;
          for (int i : it->second) {
            const Point3& p = (*pts_)[static_cast<std::size_t>(i)];
            if ((p.pos() - q).squaredNorm() <= r2) out.push_back(i);
          }
        }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// True when at least k points lie within r of q (inclusive); stops
  /// counting as soon as the threshold is met, so dense neighborhoods
  /// cost O(k) membership tests past the cell scan.
  [[nodiscard]] bool radius_count_at_least(const Vec3& q, double r, int k) const {
    if (!pts_ || k <= 0) return k <= 0;
    const double r2 = r * r;
    const int span = static_cast<int>(std::ceil(r / cell_));
    const int cx = coord(q.x()), cy = coord(q.y()), cz = coord(q.z());
    int count = 0;
    for (int dx = -span; dx <= span; ++dx)
      for (int dy = -span; dy <= span; ++dy)
        for (int dz = -span; dz <= span; ++dz) {
          const auto it = cells_.find(pack(cx + dx, cy + dy, cz + dz));
          if (it == cells_.end()) continue;
          for (int i : it->second) {
            const Point3& p = (*pts_)[static_cast<std::size_t>(i)];
            if ((p.pos() - q).squaredNorm() <= r2 && ++count >= k) return true;
          }
        }
    return false;
  }

private:
  [[nodiscard]] int coord(double v) const {
    return static_cast<int>(std::floor(v / cell_));
  }
  static std::uint64_t pack(int x, int y, int z) {
    const auto ux = static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
    const auto uy = static_cast<std::uint64_t>(static_cast<std::uint32_t>(y));
    const auto uz = static_cast<std::uint64_t>(static_cast<std::uint32_t>(z));
    return (ux * 73856093ull) ^ (uy * 19349669ull) ^ (uz * 83492791ull);
  }
  [[nodiscard]] std::uint64_t key(double x, double y, double z) const {
    return pack(coord(x), coord(y), coord(z));
  }

  const std::vector<Point3>* pts_ = nullptr;
  double cell_ = 1.0;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

/// 2D (xy) variant used for vertical-cylinder queries.
class SpatialGrid2 {
public:
  SpatialGrid2() = default;

  SpatialGrid2(const std::vector<Point3>& pts, double cell) { build(pts, cell); }

  void build(const std::vector<Point3>& pts, double cell) {
    if (cell <= 0.0) raise(ErrorCode::InvalidParam, "grid cell must be positive");
    pts_ = &pts;
    cell_ = cell;
    cells_.clear();
    for (std::size_t i = 0; i < pts.size(); ++i)
      cells_[key(pts[i].x, pts[i].y)].push_back(static_cast<int>(i));
  }

  [[nodiscard]] std::vector<int> radius_indices(const Vec2& q, double r) const {
    std::vector<int> out;
    if (!pts_) return out;
    const double r2 = r * r;
    const int span = static_cast<int>(std::ceil(r / cell_));
    const int cx = coord(q.x()), cy = coord(q.y());
    for (int dx = -span; dx <= span; ++dx)
      for (int dy = -span; dy <= span; ++dy) {
        const auto it = cells_.find(pack(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (int i : it->second) {
          const Point3& p = (*pts_)[static_cast<std::size_t>(i)];
          if ((p.xy() - q).squaredNorm() <= r2) out.push_back(i);
        }
      }
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  [[nodiscard]] int coord(double v) const {
    return static_cast<int>(std::floor(v / cell_));
  }
  static std::uint64_t pack(int x, int y) {
    const auto ux = static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
    const auto uy = static_cast<std::uint64_t>(static_cast<std::uint32_t>(y));
    return (ux * 73856093ull) ^ (uy * 19349669ull);
  }
  [[nodiscard]] std::uint64_t key(double x, double y) const {
    return pack(coord(x), coord(y));
  }

  const std::vector<Point3>* pts_ = nullptr;
  double cell_ = 1.0;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace curbscan::ml
