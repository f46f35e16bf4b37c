#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "curbscan/core/error.hpp"

namespace curbscan {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// One cloud sample. Coordinates are in feet, intensity in [0, 1].
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  [[nodiscard]] Vec3 pos() const { return {x, y, z}; }
  [[nodiscard]] Vec2 xy() const { return {x, y}; }
};

/// Semantic classes carried by LPC files. Values are the on-disk integers.
enum class ComponentLabel : int {
  Unassigned = 0,
  CenterRamp = 1,
  WarningSurface = 2,
  LeftFlare = 3,
  RightFlare = 4,
  Landing = 5,
  Gutter = 6,
};

inline constexpr int kNumLabels = 7;

inline const char* label_name(ComponentLabel l) {
  switch (l) {
    case ComponentLabel::Unassigned: return "unassigned";
    case ComponentLabel::CenterRamp: return "center_ramp";
    case ComponentLabel::WarningSurface: return "warning_surface";
    case ComponentLabel::LeftFlare: return "left_flare";
    case ComponentLabel::RightFlare: return "right_flare";
    case ComponentLabel::Landing: return "landing";
    case ComponentLabel::Gutter: return "gutter";
  }
  return "invalid";
}

/// A labeled point cloud; points and labels are parallel arrays.
struct LabeledCloud {
  std::string id;
  std::vector<Point3> points;
  std::vector<ComponentLabel> labels;

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] bool empty() const { return points.empty(); }

  void push_back(const Point3& p, ComponentLabel l) {
    points.push_back(p);
    labels.push_back(l);
  }

  /// Indices of all points carrying `l`.
  [[nodiscard]] std::vector<int> indices_of(ComponentLabel l) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == l) out.push_back(static_cast<int>(i));
    return out;
  }

  /// New cloud holding only the points carrying `l` (labels preserved).
  [[nodiscard]] LabeledCloud subset(ComponentLabel l) const {
    LabeledCloud out;
    out.id = id;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == l) out.push_back(points[i], labels[i]);
    return out;
  }
};

/// Plane n·p + d = 0 with unit normal. Orientation convention: n.z >= 0,
/// ties broken toward +x then +y.
struct Plane {
  Vec3 normal{0.0, 0.0, 1.0};
  double d = 0.0;

  [[nodiscard]] double signed_distance(const Vec3& p) const {
    return normal.dot(p) + d;
  }
  [[nodiscard]] double signed_distance(const Point3& p) const {
    return signed_distance(p.pos());
  }
};

/// 2D line a*x + b*y + c = 0 with a^2 + b^2 = 1 after normalize().
struct Line2 {
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;

  [[nodiscard]] double eval(double x, double y) const { return a * x + b * y + c; }
  [[nodiscard]] double eval(const Vec2& p) const { return eval(p.x(), p.y()); }

  [[nodiscard]] Vec2 direction() const { return {-b, a}; }
  [[nodiscard]] Vec2 normal() const { return {a, b}; }

  [[nodiscard]] Line2 normalized() const {
    const double n = std::hypot(a, b);
    if (n < 1e-300) raise(ErrorCode::DegenerateGeometry, "line has zero normal");
    return {a / n, b / n, c / n};
  }

  [[nodiscard]] Line2 flipped() const { return {-a, -b, -c}; }
};

/// Parametric 3D line p(t) = origin + t * direction (unit direction).
struct Line3 {
  Vec3 origin{0.0, 0.0, 0.0};
  Vec3 direction{1.0, 0.0, 0.0};

  [[nodiscard]] Vec3 at(double t) const { return origin + t * direction; }
};

/// 3D segment between two endpoints.
struct Segment3 {
  Vec3 a{0.0, 0.0, 0.0};
  Vec3 b{0.0, 0.0, 0.0};

  [[nodiscard]] double length() const { return (b - a).norm(); }
};

/// Axis-aligned bounds of a point set.
struct Bounds3 {
  Vec3 min{0.0, 0.0, 0.0};
  Vec3 max{0.0, 0.0, 0.0};
};

inline Bounds3 compute_bounds(const std::vector<Point3>& pts) {
  if (pts.empty()) raise(ErrorCode::EmptyCloud, "bounds of empty point set");
  Bounds3 b;
  b.min = b.max = pts.front().pos();
  for (const auto& p : pts) {
    b.min = b.min.cwiseMin(p.pos());
    b.max = b.max.cwiseMax(p.pos());
  }
  return b;
}

}  // namespace curbscan
