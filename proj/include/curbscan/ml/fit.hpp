#pragma once

#include <Eigen/Dense>
#include <vector>

#include "curbscan/core/types.hpp"

namespace curbscan::ml {

namespace detail {

/// Centroid and scatter eigen-decomposition of a point subset.
struct Scatter {
  Vec3 centroid;
  Vec3 eigenvalues;          // ascending
  Eigen::Matrix3d eigenvectors;  // columns match eigenvalues
  double scale;              // largest eigenvalue, >= 0
};

template <typename GetPoint>
Scatter scatter_of(std::size_t n, GetPoint&& get) {
  Vec3 c = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) c += get(i);
  c /= static_cast<double>(n);
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 d = get(i) - c;
    m += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  es.computeDirect(m);
  return {c, es.eigenvalues(), es.eigenvectors(), es.eigenvalues()(2)};
}

inline Vec3 orient_sign(Vec3 v) {
  // deterministic sign: z >= 0, ties toward +x then +y
  if (v.z() < 0.0) return -v;
  if (v.z() == 0.0) {
    if (v.x() < 0.0) return -v;
    if (v.x() == 0.0 && v.y() < 0.0) return -v;
  }
  return v;
}

}  // namespace detail

/// Total-least-squares plane through a subset of `pts` given by `idx`
/// (all points when idx is empty is NOT implied; pass explicit indices).
/// Throws TooFewPoints (< 3) and DegenerateGeometry (rank < 2 scatter).
inline Plane fit_plane(const std::vector<Point3>& pts, const std::vector<int>& idx) {
  if (idx.size() < 3) raise(ErrorCode::TooFewPoints, "plane fit needs >= 3 points");
  const auto sc = detail::scatter_of(idx.size(), [&](std::size_t i) {
    return pts[static_cast<std::size_t>(idx[i])].pos();
  });
  // collinear/coincident: second-smallest eigenvalue vanishes relative to scale
  if (sc.eigenvalues(1) <= 1e-7 * std::max(sc.scale, 1.0))
    raise(ErrorCode::DegenerateGeometry, "plane fit: points are collinear");
  Plane pl;
  pl.normal = detail::orient_sign(sc.eigenvectors.col(0).normalized());
  pl.d = -pl.normal.dot(sc.centroid);
  return pl;
}

inline Plane fit_plane(const std::vector<Vec3>& pts) {
  if (pts.size() < 3) raise(ErrorCode::TooFewPoints, "plane fit needs >= 3 points");
  const auto sc = detail::scatter_of(pts.size(), [&](std::size_t i) { return pts[i]; });
  if (sc.eigenvalues(1) <= 1e-7 * std::max(sc.scale, 1.0))
    raise(ErrorCode::DegenerateGeometry, "plane fit: points are collinear");
  Plane pl;
  pl.normal = detail::orient_sign(sc.eigenvectors.col(0).normalized());
  pl.d = -pl.normal.dot(sc.centroid);
  return pl;
}

/// Unoriented TLS plane normal only (no rank check beyond coincidence);
/// used by the local-normal filter where near-degenerate neighborhoods
/// should still yield a direction.
inline Vec3 fit_normal(const std::vector<Point3>& pts, const std::vector<int>& idx) {
  if (idx.size() < 3) raise(ErrorCode::TooFewPoints, "normal fit needs >= 3 points");
  const auto sc = detail::scatter_of(idx.size(), [&](std::size_t i) {
    return pts[static_cast<std::size_t>(idx[i])].pos();
  });
  return detail::orient_sign(sc.eigenvectors.col(0).normalized());
}

/// Total-least-squares 3D line through a subset. Throws TooFewPoints (< 2)
/// and DegenerateGeometry (coincident points). Direction sign is
/// deterministic (largest-|component| positive; ties toward earlier axis).
inline Line3 fit_line3(const std::vector<Point3>& pts, const std::vector<int>& idx) {
  if (idx.size() < 2) raise(ErrorCode::TooFewPoints, "line fit needs >= 2 points");
  const auto sc = detail::scatter_of(idx.size(), [&](std::size_t i) {
    return pts[static_cast<std::size_t>(idx[i])].pos();
  });
  if (sc.scale <= 1e-24)
    raise(ErrorCode::DegenerateGeometry, "line fit: points coincide");
  Vec3 dir = sc.eigenvectors.col(2).normalized();
  int major = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(dir(k)) > std::abs(dir(major))) major = k;
  if (dir(major) < 0.0) dir = -dir;
  return {sc.centroid, dir};
}

/// Mean-centered pooled variance of coordinates; gamma default for the
/// RBF kernel is 1 / (3 * sigma^2). Throws ZeroVariance when flat.
inline double pooled_variance(const std::vector<Point3>& pts,
                              const std::vector<int>& idx) {
  if (idx.empty()) raise(ErrorCode::TooFewPoints, "variance of empty set");
  Vec3 c = Vec3::Zero();
  for (int i : idx) c += pts[static_cast<std::size_t>(i)].pos();
  c /= static_cast<double>(idx.size());
  double s = 0.0;
  for (int i : idx) s += (pts[static_cast<std::size_t>(i)].pos() - c).squaredNorm();
  const double var = s / (3.0 * static_cast<double>(idx.size()));
  if (var < 1e-18) raise(ErrorCode::ZeroVariance, "all points coincide");
  return var;
}

}  // namespace curbscan::ml
