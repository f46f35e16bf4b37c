#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "curbscan/core/geom2d.hpp"
#include "curbscan/core/types.hpp"
#include "curbscan/core/util.hpp"
#include "curbscan/ml/hull.hpp"
#include "curbscan/refine/refine.hpp"
#include "curbscan/refpoint/reference.hpp"

namespace curbscan::qc {

/// Cyclic traversal of the center-ramp quadrilateral: bottom-left,
/// bottom-right, top-right, top-left. Angle slots everywhere in this module
/// follow this order; kCornerOrder maps a slot to its reference-point number.
inline constexpr std::array<int, 4> kCornerOrder = {1, 2, 4, 3};

/// Per-corner reference statistics for the angle filter (degrees).
struct AngleStats {
  double mean_deg = 90.0;
  double sigma_deg = 6.0;
};

/// Batch-derived (or externally supplied) per-corner angle statistics.
/// Slots follow kCornerOrder.
struct BatchAngleStats {
  std::array<AngleStats, 4> per_corner{};
};

struct QcParams {
  double min_density = 40.0;        ///< points/ft^2 over the coreset hulls
  double angle_z_limit = 3.0;       ///< z-score cutoff for corner angles
  double parallelism_tol_deg = 10.0;///< top/bottom edge angle tolerance
  int batch_min = 8;                ///< minimum population for batch stats
  /// When set, used instead of batch-derived statistics (a fixed reference
  /// population), so per-ramp verdicts need no batch at all.
  std::optional<std::array<AngleStats, 4>> external_stats;

  void validate() const {
    if (min_density <= 0.0) raise(ErrorCode::InvalidParam, "min_density must be positive");
    if (angle_z_limit <= 0.0) raise(ErrorCode::InvalidParam, "angle_z_limit must be positive");
    if (parallelism_tol_deg <= 0.0)
      raise(ErrorCode::InvalidParam, "parallelism_tol_deg must be positive");
    if (batch_min <= 0) raise(ErrorCode::InvalidParam, "batch_min must be positive");
    if (external_stats)
      for (const auto& s : *external_stats)
        if (s.sigma_deg <= 0.0)
          raise(ErrorCode::InvalidParam, "external sigma must be positive");
  }
};

enum class QcReasonKind { DensityTooLow, AngleOutlier, EdgesNotParallel };

/// One disqualification reason. `value` is the density, the z-score, or the
/// edge angle depending on kind; `corner` names the reference point for
/// AngleOutlier (0 when the quadrilateral itself was degenerate).
struct QcReason {
  QcReasonKind kind = QcReasonKind::DensityTooLow;
  double value = 0.0;
  int corner = 0;

  [[nodiscard]] std::string describe() const {
    char buf[64];
    switch (kind) {
      case QcReasonKind::DensityTooLow:
        std::snprintf(buf, sizeof buf, "DensityTooLow(%.6g)", value);
        return buf;
      case QcReasonKind::AngleOutlier:
        if (corner == 0 || !std::isfinite(value)) return "AngleOutlier(degenerate)";
        std::snprintf(buf, sizeof buf, "AngleOutlier(P%d,z=%.6g)", corner, value);
        return buf;
      case QcReasonKind::EdgesNotParallel:
        if (!std::isfinite(value)) return "EdgesNotParallel(degenerate)";
        std::snprintf(buf, sizeof buf, "EdgesNotParallel(%.6g deg)", value);
        return buf;
    }
    return "?";
  }

  friend bool operator==(const QcReason&, const QcReason&) = default;
};

struct QcVerdict {
  bool pass = true;
  std::vector<QcReason> reasons;  ///< pass <=> reasons empty
  std::vector<std::string> notes; ///< non-disqualifying remarks (skipped stages)
};

// ---------------------------------------------------------------------------
// stage-1: surface density
// ---------------------------------------------------------------------------

namespace detail {

/// Orthonormal in-plane basis for a unit normal.
inline std::pair<Vec3, Vec3> plane_basis(const Vec3& n) {
  const Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = n.cross(seed).normalized();
  return {u, n.cross(u)};
}

}  // namespace detail

/// Pooled coreset density: for each component, project its coreset onto the
/// component plane, take the 2D convex hull area in the plane's local frame,
/// and divide total coreset size by total hull area. Invariant under rigid
/// motion of the cloud (areas are measured in-plane).
inline double surface_density(const refine::RefinedComponents& rc) {
  double count = 0.0;
  double area = 0.0;
  for (int c = 0; c < refine::kNumComponents; ++c) {
    const auto& cs = rc.coreset[static_cast<std::size_t>(c)];
    if (cs.empty())
      raise(ErrorCode::EmptyCoreset,
            std::string(refine::component_name(c)) + " coreset unavailable");
    const auto [u, v] = detail::plane_basis(rc.plane[static_cast<std::size_t>(c)].normal);
    const Vec3 origin = rc.points()[static_cast<std::size_t>(cs.front())].pos();
    std::vector<Vec2> flat;
    flat.reserve(cs.size());
    for (int i : cs) {
      const Vec3 d = rc.points()[static_cast<std::size_t>(i)].pos() - origin;
      flat.emplace_back(d.dot(u), d.dot(v));
    }
    double a = 0.0;
    try {
      a = polygon_area(ml::convex_hull(std::move(flat)));
    } catch (const Error&) {
      raise(ErrorCode::DegenerateGeometry,
            std::string(refine::component_name(c)) + " coreset hull has zero area");
    }
    if (a < 1e-9)
      raise(ErrorCode::DegenerateGeometry,
            std::string(refine::component_name(c)) + " coreset hull has zero area");
    count += static_cast<double>(cs.size());
    area += a;
  }
  return count / area;
}

// ---------------------------------------------------------------------------
// stage-2: corner angles and edge parallelism
// ---------------------------------------------------------------------------

/// Interior angles (degrees) of the 2D quadrilateral P1-P2-P4-P3, one per
/// kCornerOrder slot. The turning-angle formula makes the four angles sum to
/// 360 degrees exactly (up to roundoff) for every simple traversal; reflex
/// corners come out > 180.
inline std::array<double, 4> corner_angles(const refpoint::ReferencePoints& refs) {
  std::array<Vec2, 4> v;
  for (int k = 0; k < 4; ++k)
    v[static_cast<std::size_t>(k)] = refs.P(kCornerOrder[static_cast<std::size_t>(k)]).xy();

  for (int k = 0; k < 4; ++k)
    if ((v[static_cast<std::size_t>((k + 1) % 4)] - v[static_cast<std::size_t>(k)]).norm() <
        1e-12)
      raise(ErrorCode::DegenerateGeometry, "zero-length quadrilateral edge");
  if (segments_properly_intersect(v[0], v[1], v[2], v[3]) ||
      segments_properly_intersect(v[1], v[2], v[3], v[0]))
    raise(ErrorCode::DegenerateGeometry, "self-intersecting corner quadrilateral");

  const double signed_area =
      polygon_signed_area(std::vector<Vec2>(v.begin(), v.end()));
  if (std::abs(signed_area) < 1e-12)
    raise(ErrorCode::DegenerateGeometry, "zero-area corner quadrilateral");
  const double orient = signed_area > 0 ? 1.0 : -1.0;

  std::array<double, 4> deg{};
  for (int k = 0; k < 4; ++k) {
    const Vec2 a = v[static_cast<std::size_t>(k)] - v[static_cast<std::size_t>((k + 3) % 4)];
    const Vec2 b = v[static_cast<std::size_t>((k + 1) % 4)] - v[static_cast<std::size_t>(k)];
    const double turn = std::atan2(cross2(a, b), a.dot(b));
    const double interior = M_PI - orient * turn;
    if (interior < 1e-9 || std::abs(interior - M_PI) < 1e-9)
      raise(ErrorCode::DegenerateGeometry, "collinear corner points");
    deg[static_cast<std::size_t>(k)] = interior * 180.0 / M_PI;
  }
  return deg;
}

/// Per-corner statistics for the angle filter. External stats, when present,
/// take precedence (they define the reference population); otherwise the
/// batch itself must reach `batch_min`.
inline BatchAngleStats batch_angle_stats(const std::vector<std::array<double, 4>>& batch,
                                         const QcParams& prm) {
  prm.validate();
  BatchAngleStats out;
  if (prm.external_stats) {
    out.per_corner = *prm.external_stats;
    return out;
  }
  if (static_cast<int>(batch.size()) < prm.batch_min)
    raise(ErrorCode::InsufficientPopulation,
          "angle filter needs " + std::to_string(prm.batch_min) + " ramps, got " +
              std::to_string(batch.size()));
  for (int k = 0; k < 4; ++k) {
    std::vector<double> col;
    col.reserve(batch.size());
    for (const auto& a : batch) col.push_back(a[static_cast<std::size_t>(k)]);
    out.per_corner[static_cast<std::size_t>(k)] = {mean_of(col), stddev_of(col)};
  }
  return out;
}

/// Z-score one ramp's corner angles against the statistics. All outlier
/// corners are reported. Zero-sigma populations flag only genuine deviations
/// (> 1e-9 degrees), reported with an infinite z.
inline std::vector<QcReason> angle_outliers(const std::array<double, 4>& angles,
                                            const BatchAngleStats& stats,
                                            const QcParams& prm) {
  std::vector<QcReason> out;
  for (int k = 0; k < 4; ++k) {
    const auto& s = stats.per_corner[static_cast<std::size_t>(k)];
    const double dev = std::abs(angles[static_cast<std::size_t>(k)] - s.mean_deg);
    double z = 0.0;
    if (s.sigma_deg < 1e-12) {
      if (dev <= 1e-9) continue;
      z = std::numeric_limits<double>::infinity();
    } else {
      z = dev / s.sigma_deg;
    }
    if (z > prm.angle_z_limit)
      out.push_back({QcReasonKind::AngleOutlier, z, kCornerOrder[static_cast<std::size_t>(k)]});
  }
  return out;
}

/// Batch filter: per-ramp outlier reasons, aligned with the input order.
/// Reordering the batch permutes the output identically (the statistics are
/// order-free).
inline std::vector<std::vector<QcReason>> angle_filter(
    const std::vector<std::array<double, 4>>& batch, const QcParams& prm) {
  const BatchAngleStats stats = batch_angle_stats(batch, prm);
  std::vector<std::vector<QcReason>> out;
  out.reserve(batch.size());
  for (const auto& a : batch) out.push_back(angle_outliers(a, stats, prm));
  return out;
}

struct ParallelismResult {
  double angle_deg = 0.0;
  bool pass = true;
};

/// Angle between the bottom (P1->P2) and top (P3->P4) edges as undirected
/// lines, folded to [0, 90] degrees so the verdict is independent of corner
/// ordering conventions.
inline ParallelismResult parallelism_check(const refpoint::ReferencePoints& refs,
                                           const QcParams& prm) {
  prm.validate();
  const Vec2 u = refs.P(2).xy() - refs.P(1).xy();
  const Vec2 v = refs.P(4).xy() - refs.P(3).xy();
  if (u.norm() < 1e-12 || v.norm() < 1e-12)
    raise(ErrorCode::DegenerateGeometry, "zero-length reference edge");
  const double c = std::min(1.0, std::abs(u.dot(v)) / (u.norm() * v.norm()));
  const double angle = std::acos(c) * 180.0 / M_PI;
  return {angle, angle <= prm.parallelism_tol_deg};
}

// ---------------------------------------------------------------------------
// aggregation
// ---------------------------------------------------------------------------

/// Everything the QC stages computed for one ramp, plus the verdict. Stage
/// failures (degenerate geometry) never abort: the value stays NaN and the
/// stage contributes a degenerate reason.
struct QcReport {
  double density = std::numeric_limits<double>::quiet_NaN();
  std::array<double, 4> angles = {std::numeric_limits<double>::quiet_NaN(),
                                  std::numeric_limits<double>::quiet_NaN(),
                                  std::numeric_limits<double>::quiet_NaN(),
                                  std::numeric_limits<double>::quiet_NaN()};
  double parallelism_deg = std::numeric_limits<double>::quiet_NaN();
  QcVerdict verdict;
};

/// Runs both QC stages and aggregates all applicable reasons (no
/// short-circuiting). Pass `batch == nullptr` when no angle statistics are
/// available (population too small, no externals): the angle stage is then
/// skipped with a note instead of disqualifying the ramp.
inline QcReport qc_report(const refine::RefinedComponents& refined,
                          const refpoint::ReferencePoints& refs,
                          const BatchAngleStats* batch, const QcParams& prm) {
  prm.validate();
  QcReport r;

  try {
    r.density = surface_density(refined);
    if (r.density < prm.min_density)
      r.verdict.reasons.push_back({QcReasonKind::DensityTooLow, r.density, 0});
  } catch (const Error&) {
    r.verdict.reasons.push_back({QcReasonKind::DensityTooLow, 0.0, 0});
  }

  bool quad_ok = false;
  try {
    r.angles = corner_angles(refs);
    quad_ok = true;
  } catch (const Error&) {
    if (batch)
      r.verdict.reasons.push_back(
          {QcReasonKind::AngleOutlier, std::numeric_limits<double>::infinity(), 0});
  }
  if (batch) {
    if (quad_ok)
      for (const auto& reason : angle_outliers(r.angles, *batch, prm))
        r.verdict.reasons.push_back(reason);
  } else {
    r.verdict.notes.push_back("angle filter skipped: no batch statistics");
  }

  try {
    const auto pr = parallelism_check(refs, prm);
    r.parallelism_deg = pr.angle_deg;
    if (!pr.pass)
      r.verdict.reasons.push_back({QcReasonKind::EdgesNotParallel, pr.angle_deg, 0});
  } catch (const Error&) {
    r.verdict.reasons.push_back(
        {QcReasonKind::EdgesNotParallel, std::numeric_limits<double>::infinity(), 0});
  }

  r.verdict.pass = r.verdict.reasons.empty();
  return r;
}

inline QcVerdict run_qc(const refine::RefinedComponents& refined,
                        const refpoint::ReferencePoints& refs,
                        const BatchAngleStats* batch, const QcParams& prm) {
  return qc_report(refined, refs, batch, prm).verdict;
}

// ---------------------------------------------------------------------------
// summary CSV
// ---------------------------------------------------------------------------

inline std::string qc_csv_header() {
  return "id,density,angle_p1,angle_p2,angle_p4,angle_p3,parallelism_deg,verdict,reasons";
}

inline std::string qc_csv_row(const std::string& id, const QcReport& r) {
  auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::string(buf);
  };
  std::string row = id;
  row += ',' + num(r.density);
  for (double a : r.angles) row += ',' + num(a);
  row += ',' + num(r.parallelism_deg);
  row += r.verdict.pass ? ",pass," : ",fail,";
  for (std::size_t i = 0; i < r.verdict.reasons.size(); ++i) {
    if (i) row += ';';
    row += r.verdict.reasons[i].describe();
  }
  return row;
}

}  // namespace curbscan::qc
