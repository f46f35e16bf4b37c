#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "curbscan/core/geom2d.hpp"
#include "curbscan/core/types.hpp"
#include "curbscan/core/util.hpp"
#include "curbscan/measure/record.hpp"
#include "curbscan/ml/fit.hpp"
#include "curbscan/ml/spatial_grid.hpp"
#include "curbscan/refine/refine.hpp"
#include "curbscan/refpoint/reference.hpp"

namespace curbscan::measure {

struct MeasureParams {
  std::array<double, 3> fractions = {0.1, 0.5, 0.9};  ///< reference-line stations
  int k = 300;                      ///< initial refit support size
  double discard_ft = 1.0 / 48.0;   ///< quarter-inch perpendicular discard
  int max_refit_iters = 50;
  double step_ft = 0.25;            ///< landing/gutter extension step
  double slope_jump_pct = 2.0;      ///< grade-break detection threshold
  double max_extension_ft = 8.0;    ///< extension walk cap
  double cylinder_radius_ft = 0.15; ///< vertical-projection cylinder

  void validate() const {
    for (double f : fractions)
      if (!(f > 0.0 && f < 1.0))
        raise(ErrorCode::InvalidParam, "fractions must lie in (0, 1)");
    if (k < 10) raise(ErrorCode::InvalidParam, "refit support k must be >= 10");
    if (discard_ft <= 0.0) raise(ErrorCode::InvalidParam, "discard distance must be positive");
    if (max_refit_iters < 1) raise(ErrorCode::InvalidParam, "refit iteration cap must be >= 1");
    if (step_ft <= 0.0) raise(ErrorCode::InvalidParam, "extension step must be positive");
    if (slope_jump_pct <= 0.0) raise(ErrorCode::InvalidParam, "slope jump must be positive");
    if (max_extension_ft < step_ft)
      raise(ErrorCode::InvalidParam, "max extension must cover at least one step");
    if (cylinder_radius_ft <= 0.0)
      raise(ErrorCode::InvalidParam, "cylinder radius must be positive");
  }
};

/// Four boundary corners of an approximated landing/gutter region, in cyclic
/// order near-left, near-right, far-right, far-left ("near" = the ramp edge
/// the walk started from). `flagged` marks a region closed at the extension
/// cap (or an exhausted surface) instead of a detected grade break.
struct RegionQuad {
  std::array<Vec3, 4> corner{};
  bool flagged = false;
};

using LandingQuad = RegionQuad;
using GutterQuad = RegionQuad;

/// Seed segments for the center-ramp reference lines.
struct RefLines {
  std::array<Segment3, 3> slope;  ///< bottom-edge station -> top-edge station
  std::array<Segment3, 3> cross;  ///< left-edge station -> right-edge station
};

// ---------------------------------------------------------------------------
// slope primitives
// ---------------------------------------------------------------------------

inline double percent_grade(double theta_deg) {
  if (!(std::abs(theta_deg) < 90.0))
    raise(ErrorCode::OutOfRange, "grade undefined at |theta| >= 90 degrees");
  return std::tan(theta_deg * M_PI / 180.0) * 100.0;
}

/// Unsigned grade of a 3D line: 100 |dz| / sqrt(dx^2 + dy^2).
inline double line_slope_percent(const Line3& line) {
  const Vec3& d = line.direction;
  const double horiz = std::hypot(d.x(), d.y());
  if (horiz <= 1e-9 * d.norm())
    raise(ErrorCode::VerticalLine, "line has no horizontal extent");
  return 100.0 * std::abs(d.z()) / horiz;
}

// ---------------------------------------------------------------------------
// reference lines and iterative refit
// ---------------------------------------------------------------------------

namespace detail {

inline Vec3 lerp(const Vec3& a, const Vec3& b, double f) { return a + f * (b - a); }

inline double point_line_dist(const Vec3& p, const Line3& ln) {
  const Vec3 d = ln.direction.normalized();
  const Vec3 r = p - ln.origin;
  return (r - r.dot(d) * d).norm();
}

/// Intersection of a 3D line with the vertical plane over a 2D line.
inline Vec3 cut_vertical_plane(const Line3& ln, const Line2& plane) {
  const double denom = plane.a * ln.direction.x() + plane.b * ln.direction.y();
  const double scale = std::hypot(plane.a, plane.b) * ln.direction.norm();
  if (std::abs(denom) <= 1e-9 * std::max(scale, 1e-300))
    raise(ErrorCode::DegenerateGeometry, "reference line parallel to cutting plane");
  const double t = -(plane.a * ln.origin.x() + plane.b * ln.origin.y() + plane.c) / denom;
  return ln.at(t);
}

inline void require_simple_quad(const std::array<Vec3, 4>& c) {
  std::array<Vec2, 4> v;
  for (int k = 0; k < 4; ++k) v[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k)].head<2>();
  for (int k = 0; k < 4; ++k)
    if ((v[static_cast<std::size_t>((k + 1) % 4)] - v[static_cast<std::size_t>(k)]).norm() < 1e-9)
      raise(ErrorCode::DegenerateGeometry, "quad has a zero-length edge");
  if (segments_properly_intersect(v[0], v[1], v[2], v[3]) ||
      segments_properly_intersect(v[1], v[2], v[3], v[0]))
    raise(ErrorCode::DegenerateGeometry, "quad is self-intersecting");
}

inline std::vector<int> points_in_quad(const std::vector<Point3>& pts,
                                       const std::array<Vec3, 4>& c) {
  std::vector<Vec2> poly;
  poly.reserve(4);
  for (const auto& q : c) poly.push_back(q.head<2>());
  std::vector<int> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (point_in_polygon(pts[i].xy(), poly)) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace detail

/// Seed segments at the configured fractions: slope lines connect bottom-edge
/// (P1->P2) stations to top-edge (P3->P4) stations; cross lines connect
/// left-edge (P1->P3) stations to right-edge (P2->P4) stations.
inline RefLines initial_reference_lines(const refpoint::ReferencePoints& refs,
                                        const std::array<double, 3>& fractions) {
  const Vec3 p1 = refs.P(1).pos(), p2 = refs.P(2).pos();
  const Vec3 p3 = refs.P(3).pos(), p4 = refs.P(4).pos();
  for (const auto& [a, b] :
       {std::pair{p1, p2}, std::pair{p3, p4}, std::pair{p1, p3}, std::pair{p2, p4}})
    if ((b - a).norm() < 1e-9)
      raise(ErrorCode::DegenerateGeometry, "reference edge has zero length");
  RefLines out;
  for (int i = 0; i < 3; ++i) {
    const double f = fractions[static_cast<std::size_t>(i)];
    out.slope[static_cast<std::size_t>(i)] = {detail::lerp(p1, p2, f), detail::lerp(p3, p4, f)};
    out.cross[static_cast<std::size_t>(i)] = {detail::lerp(p1, p3, f), detail::lerp(p2, p4, f)};
  }
  return out;
}

/// 300-point iterative refit: support = k nearest region points to the seed
/// segment (ties by distance then index), then repeat { TLS 3D line fit, drop
/// points farther than the quarter-inch perpendicular corridor } until a
/// fixed point. The support only shrinks, so termination is guaranteed below
/// the iteration cap unless points keep dropping every round.
inline Line3 iterative_line_refit(const std::vector<Point3>& pts,
                                  const std::vector<int>& region, const Segment3& seed,
                                  const MeasureParams& prm,
                                  std::vector<int>* out_support = nullptr) {
  std::vector<std::pair<double, int>> order;
  order.reserve(region.size());
  for (int i : region)
    order.emplace_back(
        point_segment_distance3(pts[static_cast<std::size_t>(i)].pos(), seed.a, seed.b), i);
  const std::size_t take = std::min<std::size_t>(order.size(), static_cast<std::size_t>(prm.k));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                    order.end());
  std::vector<int> support;
  support.reserve(take);
  for (std::size_t i = 0; i < take; ++i) support.push_back(order[i].second);

  if (support.size() < 10)
    raise(ErrorCode::InsufficientSupport,
          "refit support has " + std::to_string(support.size()) + " points");

  for (int iter = 0; iter < prm.max_refit_iters; ++iter) {
    const Line3 line = ml::fit_line3(pts, support);
    std::vector<int> kept;
    kept.reserve(support.size());
    for (int i : support)
      if (detail::point_line_dist(pts[static_cast<std::size_t>(i)].pos(), line) <=
          prm.discard_ft)
        kept.push_back(i);
    if (kept.size() == support.size()) {
      if (out_support) *out_support = std::move(support);
      return line;
    }
    support = std::move(kept);
    if (support.size() < 10)
      raise(ErrorCode::InsufficientSupport,
            "refit support fell to " + std::to_string(support.size()) + " points");
  }
  raise(ErrorCode::NonConvergence, "refit still dropping points at the iteration cap");
}

// ---------------------------------------------------------------------------
// center ramp and flares
// ---------------------------------------------------------------------------

/// A (slope lines), B (cross lines), and C (width between the separator
/// planes along each refined cross line, in inches). Refit failures mark the
/// affected sub-measurements invalid; a C value additionally requires its B
/// line.
inline void measure_center_ramp(const std::vector<Point3>& pts,
                                const std::vector<int>& center_region,
                                const refpoint::ReferencePoints& refs,
                                const refpoint::Separators& seps, const MeasureParams& prm,
                                MeasurementRecord& rec) {
  const RefLines lines = initial_reference_lines(refs, prm.fractions);
  for (int i = 0; i < 3; ++i) {
    try {
      const Line3 ln = iterative_line_refit(
          pts, center_region, lines.slope[static_cast<std::size_t>(i)], prm);
      rec.set(Feature::A, i, line_slope_percent(ln));
    } catch (const Error&) {
    }
    try {
      const Line3 ln = iterative_line_refit(
          pts, center_region, lines.cross[static_cast<std::size_t>(i)], prm);
      rec.set(Feature::B, i, line_slope_percent(ln));
      const Vec3 a = detail::cut_vertical_plane(ln, seps.left);
      const Vec3 b = detail::cut_vertical_plane(ln, seps.right);
      rec.set(Feature::C, i, 12.0 * (b - a).norm());
    } catch (const Error&) {
    }
  }
}

/// D1 over the left flare (seed P1->P5) and E1 over the right (seed P2->P6),
/// independently: a missing flare invalidates only its own value.
inline void measure_flares(const std::vector<Point3>& pts, const std::vector<int>& left_region,
                           const std::vector<int>& right_region,
                           const refpoint::ReferencePoints& refs, const MeasureParams& prm,
                           MeasurementRecord& rec) {
  try {
    const Line3 ln = iterative_line_refit(
        pts, left_region, {refs.P(1).pos(), refs.P(5).pos()}, prm);
    rec.set(Feature::D, 0, line_slope_percent(ln));
  } catch (const Error&) {
  }
  try {
    const Line3 ln = iterative_line_refit(
        pts, right_region, {refs.P(2).pos(), refs.P(6).pos()}, prm);
    rec.set(Feature::E, 0, line_slope_percent(ln));
  } catch (const Error&) {
  }
}

// ---------------------------------------------------------------------------
// landing / gutter approximation walks
// ---------------------------------------------------------------------------

namespace detail {

struct WalkResult {
  Vec3 end{};
  bool flagged = false;  ///< no grade break found (cap or surface exhausted)
};

struct Station {
  double d;
  double z;
};

/// Least-squares z(d) fit; stations are distinct in d by construction.
inline std::pair<double, double> fit_stations(const std::vector<Station>& st,
                                              std::size_t first, std::size_t count) {
  double sd = 0, sz = 0;
  for (std::size_t i = first; i < first + count; ++i) {
    sd += st[i].d;
    sz += st[i].z;
  }
  const double md = sd / static_cast<double>(count);
  const double mz = sz / static_cast<double>(count);
  double cov = 0, var = 0;
  for (std::size_t i = first; i < first + count; ++i) {
    cov += (st[i].d - md) * (st[i].z - mz);
    var += (st[i].d - md) * (st[i].d - md);
  }
  const double b = var > 1e-300 ? cov / var : 0.0;
  return {mz - b * md, b};  // intercept, slope
}

/// Step outward from `anchor` along `dir`, projecting each station vertically
/// onto the cloud (median z inside the cylinder). A station's windowed slope
/// spans the three previously accepted stations; a jump beyond the running
/// median of accepted slopes marks a grade break. The boundary is then
/// refined by intersecting least-squares lines over the pre- and post-break
/// stations (the windowed detector alone lags the interface by up to two
/// steps, enough to drag the outermost reference lines into the next
/// surface regime). Stations holding 1-2 points are skipped; an empty later
/// station ends the walk flagged. NoSurfacePoints fires only when the first
/// station is empty.
inline WalkResult extension_walk(const std::vector<Point3>& pts, const ml::SpatialGrid2& grid,
                                 const Vec3& anchor, const Vec2& dir,
                                 const MeasureParams& prm) {
  const int max_station =
      static_cast<int>(std::floor(prm.max_extension_ft / prm.step_ft + 1e-9));
  enum class Probe { Usable, Thin, Empty };
  struct ProbeResult {
    Probe status;
    double z;
  };
  auto station_z = [&](int m) -> ProbeResult {
    const Vec2 xy = anchor.head<2>() + (m * prm.step_ft) * dir;
    std::vector<double> zs;
    for (int i : grid.radius_indices(xy, prm.cylinder_radius_ft))
      zs.push_back(pts[static_cast<std::size_t>(i)].z);
    if (zs.empty()) {
      if (m == 1)
        raise(ErrorCode::NoSurfacePoints, "no surface points at the first extension station");
      return {Probe::Empty, 0.0};
    }
    if (zs.size() < 3) return {Probe::Thin, 0.0};  // too thin to trust; skip
    return {Probe::Usable, median(std::move(zs))};
  };
  auto at_distance = [&](double d, double z) -> Vec3 {
    const Vec2 xy = anchor.head<2>() + d * dir;
    return {xy.x(), xy.y(), z};
  };

  std::vector<Station> accepted = {{0.0, anchor.z()}};
  std::vector<double> slopes;
  Station brk{};
  bool found_break = false;
  int m = 1;
  for (; m <= max_station; ++m) {
    const auto [status, z] = station_z(m);
    if (status == Probe::Empty) break;  // surface ran out: terminate flagged
    if (status == Probe::Thin) continue;
    const double d = m * prm.step_ft;
    if (accepted.size() >= 3) {
      const Station& base = accepted[accepted.size() - 3];
      const double s = 100.0 * (z - base.z) / (d - base.d);
      if (!slopes.empty() && std::abs(s - median(slopes)) > prm.slope_jump_pct) {
        brk = {d, z};
        found_break = true;
        break;
      }
      slopes.push_back(s);
    }
    accepted.push_back({d, z});
  }

  if (!found_break) {
    const Station& last = accepted.back();
    return {at_distance(last.d, last.z), true};
  }

  // Regime intersection: the detector window spans the last three steps, so
  // the interface lies in (brk.d - 3 step, brk.d]. Fit the old regime over
  // stations at or before that window (they are provably pure) and the new
  // regime over stations past the breaking one (the breaking station's
  // cylinder may straddle the interface), then cut where the lines cross.
  const double lo = std::max(0.0, brk.d - 3.0 * prm.step_ft);
  std::vector<Station> post;
  for (int mm = m + 1; mm <= max_station && post.size() < 4; ++mm) {
    const auto [status, z] = station_z(mm);
    if (status == Probe::Empty) break;
    if (status == Probe::Thin) continue;
    post.push_back({mm * prm.step_ft, z});
  }
  std::size_t pre_end = accepted.size();
  while (pre_end > 0 && accepted[pre_end - 1].d > lo + 1e-9) --pre_end;
  const std::size_t pre_n = std::min<std::size_t>(pre_end, 6);
  const Station& last = accepted.back();
  if (pre_n >= 2 && post.size() >= 2) {
    const auto [a1, b1] = fit_stations(accepted, pre_end - pre_n, pre_n);
    const auto [a2, b2] = fit_stations(post, 0, post.size());
    if (std::abs(b1 - b2) > 1e-12) {
      const double cut = std::clamp((a2 - a1) / (b1 - b2), lo, brk.d);
      return {at_distance(cut, a1 + b1 * cut), false};
    }
  }
  return {at_distance(last.d, last.z), false};
}

inline Vec2 walk_direction(const Vec3& from, const Vec3& to) {
  const Vec2 d = to.head<2>() - from.head<2>();
  if (d.norm() < 1e-9)
    raise(ErrorCode::DegenerateGeometry, "extension direction undefined");
  return d / d.norm();
}

}  // namespace detail

/// Landing boundary: extend each side edge beyond the top corners until the
/// windowed slope jumps; the two termination points close the quad over
/// P3/P4.
inline LandingQuad approximate_landing(const std::vector<Point3>& pts,
                                       const ml::SpatialGrid2& grid,
                                       const refpoint::ReferencePoints& refs,
                                       const MeasureParams& prm) {
  prm.validate();
  const Vec3 p3 = refs.P(3).pos(), p4 = refs.P(4).pos();
  const auto left = detail::extension_walk(
      pts, grid, p3, detail::walk_direction(refs.P(1).pos(), p3), prm);
  const auto right = detail::extension_walk(
      pts, grid, p4, detail::walk_direction(refs.P(2).pos(), p4), prm);
  LandingQuad quad{{p3, p4, right.end, left.end}, left.flagged || right.flagged};
  detail::require_simple_quad(quad.corner);
  return quad;
}

/// Gutter boundary: the same walk applied street-side from the bottom
/// corners, terminating at the gutter/road grade break.
inline GutterQuad approximate_gutter(const std::vector<Point3>& pts,
                                     const ml::SpatialGrid2& grid,
                                     const refpoint::ReferencePoints& refs,
                                     const MeasureParams& prm) {
  prm.validate();
  const Vec3 p1 = refs.P(1).pos(), p2 = refs.P(2).pos();
  const auto left = detail::extension_walk(
      pts, grid, p1, detail::walk_direction(refs.P(3).pos(), p1), prm);
  const auto right = detail::extension_walk(
      pts, grid, p2, detail::walk_direction(refs.P(4).pos(), p2), prm);
  GutterQuad quad{{p1, p2, right.end, left.end}, left.flagged || right.flagged};
  detail::require_simple_quad(quad.corner);
  return quad;
}

// ---------------------------------------------------------------------------
// quad measurements
// ---------------------------------------------------------------------------

namespace detail {

/// Perpendicular ("slope"-direction) seed line at fraction f: near-edge
/// station to far-edge station.
inline Segment3 quad_perp_line(const RegionQuad& q, double f) {
  return {lerp(q.corner[0], q.corner[1], f), lerp(q.corner[3], q.corner[2], f)};
}

/// Curb-parallel ("cross"-direction) seed line at depth fraction f.
inline Segment3 quad_cross_line(const RegionQuad& q, double f) {
  return {lerp(q.corner[0], q.corner[3], f), lerp(q.corner[1], q.corner[2], f)};
}

}  // namespace detail

/// Landing measurements inside the quad, mirroring the center-ramp scheme:
/// J (slope) from perpendicular lines, I (cross slope) from curb-parallel
/// lines, K (width) between the side-edge planes along each I line, L
/// (depth) between the near/far-edge planes along each J line.
inline void measure_landing(const std::vector<Point3>& pts, const LandingQuad& quad,
                            const MeasureParams& prm, MeasurementRecord& rec) {
  prm.validate();
  detail::require_simple_quad(quad.corner);
  const std::vector<int> region = detail::points_in_quad(pts, quad.corner);

  const Line2 side_l =
      line_through(quad.corner[0].head<2>(), quad.corner[3].head<2>());
  const Line2 side_r =
      line_through(quad.corner[1].head<2>(), quad.corner[2].head<2>());
  const Line2 near_e =
      line_through(quad.corner[0].head<2>(), quad.corner[1].head<2>());
  const Line2 far_e = line_through(quad.corner[3].head<2>(), quad.corner[2].head<2>());

  for (int i = 0; i < 3; ++i) {
    const double f = prm.fractions[static_cast<std::size_t>(i)];
    try {
      const Line3 ln = iterative_line_refit(pts, region, detail::quad_perp_line(quad, f), prm);
      rec.set(Feature::J, i, line_slope_percent(ln));
      const Vec3 a = detail::cut_vertical_plane(ln, near_e);
      const Vec3 b = detail::cut_vertical_plane(ln, far_e);
      rec.set(Feature::L, i, 12.0 * (b - a).norm());
    } catch (const Error&) {
    }
    try {
      const Line3 ln = iterative_line_refit(pts, region, detail::quad_cross_line(quad, f), prm);
      rec.set(Feature::I, i, line_slope_percent(ln));
      const Vec3 a = detail::cut_vertical_plane(ln, side_l);
      const Vec3 b = detail::cut_vertical_plane(ln, side_r);
      rec.set(Feature::K, i, 12.0 * (b - a).norm());
    } catch (const Error&) {
    }
  }
}

/// Gutter slopes F (curb-parallel, depth fractions 1/3 and 2/3), gutter
/// cross slopes G (perpendicular, standard fractions), and road cross slopes
/// H measured in a band of equal depth immediately beyond the gutter quad.
inline void measure_gutter_and_road(const std::vector<Point3>& pts, const GutterQuad& quad,
                                    const MeasureParams& prm, MeasurementRecord& rec) {
  prm.validate();
  detail::require_simple_quad(quad.corner);
  const std::vector<int> gutter_region = detail::points_in_quad(pts, quad.corner);

  for (int i = 0; i < 2; ++i) {
    try {
      const Line3 ln = iterative_line_refit(
          pts, gutter_region, detail::quad_cross_line(quad, (i + 1) / 3.0), prm);
      rec.set(Feature::F, i, line_slope_percent(ln));
    } catch (const Error&) {
    }
  }
  for (int i = 0; i < 3; ++i) {
    try {
      const Line3 ln = iterative_line_refit(
          pts, gutter_region,
          detail::quad_perp_line(quad, prm.fractions[static_cast<std::size_t>(i)]), prm);
      rec.set(Feature::G, i, line_slope_percent(ln));
    } catch (const Error&) {
    }
  }

  // road band beyond the gutter, same depth per side
  RegionQuad road{{quad.corner[3], quad.corner[2],
                   quad.corner[2] + (quad.corner[2] - quad.corner[1]),
                   quad.corner[3] + (quad.corner[3] - quad.corner[0])},
                  quad.flagged};
  try {
    detail::require_simple_quad(road.corner);
    const std::vector<int> road_region = detail::points_in_quad(pts, road.corner);
    for (int i = 0; i < 3; ++i) {
      try {
        const Line3 ln = iterative_line_refit(
            pts, road_region,
            detail::quad_perp_line(road, prm.fractions[static_cast<std::size_t>(i)]), prm);
        rec.set(Feature::H, i, line_slope_percent(ln));
      } catch (const Error&) {
      }
    }
  } catch (const Error&) {
  }
}

// ---------------------------------------------------------------------------
// aggregation
// ---------------------------------------------------------------------------

struct MeasureResult {
  MeasurementRecord record;
  LandingQuad landing;
  GutterQuad gutter;
  bool landing_valid = false;  ///< approximation succeeded (quad usable)
  bool gutter_valid = false;
};

/// Full measurement pass over a refined ramp. Individual failures mark their
/// sub-measurements invalid; only a QC contract violation aborts.
inline MeasureResult measure_ramp(const refine::RefinedComponents& refined,
                                  const refpoint::ReferencePoints& refs,
                                  const refpoint::Separators& seps, bool qc_passed,
                                  const MeasureParams& prm) {
  if (!qc_passed)
    raise(ErrorCode::QcNotPassed, "measurement requires a passing QC verdict");
  prm.validate();

  const std::vector<Point3>& pts = refined.points();
  MeasureResult out;
  measure_center_ramp(pts, refined.points_of(refine::kCenter), refs, seps, prm, out.record);
  measure_flares(pts, refined.points_of(refine::kLeftFlare),
                 refined.points_of(refine::kRightFlare), refs, prm, out.record);

  const ml::SpatialGrid2 grid(pts, prm.cylinder_radius_ft);
  try {
    out.landing = approximate_landing(pts, grid, refs, prm);
    out.landing_valid = true;
    measure_landing(pts, out.landing, prm, out.record);
  } catch (const Error&) {
  }
  try {
    out.gutter = approximate_gutter(pts, grid, refs, prm);
    out.gutter_valid = true;
    measure_gutter_and_road(pts, out.gutter, prm, out.record);
  } catch (const Error&) {
  }
  return out;
}

// ---------------------------------------------------------------------------
// flat CSV serialization: 31 value columns then 31 validity columns
// ---------------------------------------------------------------------------

inline std::string record_csv_header() {
  std::string h;
  for (Feature f : kAllFeatures)
    for (int i = 0; i < MeasurementRecord::count(f); ++i) {
      if (!h.empty()) h += ',';
      h += MeasurementRecord::slot_name(f, i);
    }
  for (Feature f : kAllFeatures)
    for (int i = 0; i < MeasurementRecord::count(f); ++i)
      h += ',' + MeasurementRecord::slot_name(f, i) + "_ok";
  return h;
}

inline std::string record_csv_row(const MeasurementRecord& rec) {
  std::string row;
  char buf[32];
  bool first = true;
  for (Feature f : kAllFeatures)
    for (int i = 0; i < MeasurementRecord::count(f); ++i) {
      if (!first) row += ',';
      first = false;
      const auto& s = rec.at(f, i);
      if (s.valid) {
        std::snprintf(buf, sizeof buf, "%.6g", s.value);
        row += buf;
      }
    }
  for (Feature f : kAllFeatures)
    for (int i = 0; i < MeasurementRecord::count(f); ++i)
      row += rec.at(f, i).valid ? ",1" : ",0";
  return row;
}

}  // namespace curbscan::measure
