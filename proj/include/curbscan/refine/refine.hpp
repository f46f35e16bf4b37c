#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "curbscan/core/error.hpp"
#include "curbscan/core/lpc_io.hpp"
#include "curbscan/core/types.hpp"
#include "curbscan/core/util.hpp"
#include "curbscan/ml/dbscan.hpp"
#include "curbscan/ml/fit.hpp"
#include "curbscan/ml/iforest.hpp"
#include "curbscan/ml/ocsvm.hpp"
#include "curbscan/ml/spatial_grid.hpp"
#include "curbscan/refpoint/reference.hpp"

namespace curbscan::refine {

/// Component indices used throughout refinement. The order doubles as the
/// argmin tie-break in the plane reassignment stage.
inline constexpr int kCenter = 0;
inline constexpr int kLeftFlare = 1;
inline constexpr int kRightFlare = 2;
inline constexpr int kNumComponents = 3;

inline ComponentLabel component_label(int comp) {
  switch (comp) {
    case kCenter: return ComponentLabel::CenterRamp;
    case kLeftFlare: return ComponentLabel::LeftFlare;
    case kRightFlare: return ComponentLabel::RightFlare;
    default: break;
  }
  raise(ErrorCode::IndexOutOfRange, "component index out of [0, 3)");
}

inline const char* component_name(int comp) {
  switch (comp) {
    case kCenter: return "center ramp";
    case kLeftFlare: return "left flare";
    case kRightFlare: return "right flare";
    default: break;
  }
  return "invalid";
}

/// @brief Parameters of the component-refinement pipeline.
struct RefineParams {
  double nu = 0.7;               ///< OCSVM coreset mass parameter
  double gamma = 0.0;            ///< RBF width; <= 0 selects the pooled-variance default
  double plane_dist_t = 0.05;    ///< reassignment distance threshold t (ft)
  double neighbor_radius = 0.25; ///< local-normal neighborhood radius r (ft, = 3 in)
  double s_crit = 0.999;         ///< |cos| threshold for normal consistency
  int iforest_trees = 100;
  int iforest_subsample = 256;
  double contamination = 0.02;   ///< fraction removed by the isolation forest
  double dbscan_eps = 2.0;       ///< clustering radius (ft)
  int dbscan_min_pts = 10;
  std::size_t sblf_cap = refpoint::kSblfDefaultCap;  ///< bottom-line candidate cap
  std::uint64_t seed = 0;

  void validate() const {
    if (!(nu > 0.0 && nu < 1.0)) raise(ErrorCode::InvalidNu, "nu must be in (0, 1)");
    if (gamma < 0.0) raise(ErrorCode::InvalidGamma, "gamma must be >= 0");
    if (plane_dist_t <= 0.0) raise(ErrorCode::InvalidParam, "plane_dist_t must be positive");
    if (neighbor_radius <= 0.0) raise(ErrorCode::InvalidParam, "neighbor_radius must be positive");
    if (!(s_crit > 0.0 && s_crit <= 1.0)) raise(ErrorCode::InvalidParam, "s_crit must be in (0, 1]");
    if (iforest_trees < 1) raise(ErrorCode::InvalidParam, "iforest_trees must be >= 1");
    if (iforest_subsample < 2) raise(ErrorCode::InvalidParam, "iforest_subsample must be >= 2");
    if (contamination < 0.0 || contamination > 0.5)
      raise(ErrorCode::InvalidParam, "contamination out of [0, 0.5]");
    if (dbscan_eps <= 0.0) raise(ErrorCode::InvalidParam, "dbscan_eps must be positive");
    if (dbscan_min_pts < 1) raise(ErrorCode::InvalidParam, "dbscan_min_pts must be >= 1");
    if (sblf_cap < 2) raise(ErrorCode::InvalidParam, "sblf_cap must be >= 2");
  }
};

/// @brief Refinement output: a disjoint assignment of every point to one of
/// the three components or the unassigned pool, plus the per-component
/// models the stages were built from.
struct RefinedComponents {
  std::array<std::vector<int>, 3> assigned;  ///< P*_i, ascending indices
  std::vector<int> unassigned;               ///< U*, ascending (landing/gutter included)
  std::array<std::vector<int>, 3> coreset;   ///< C_i from the OCSVM stage
  std::array<Plane, 3> plane;                ///< TLS fits over the coresets
  std::array<Vec3, 3> centroid;              ///< coreset centroids
  std::vector<int> landing;  ///< originally Landing-labeled points (kept out of band)
  std::vector<int> gutter;   ///< originally Gutter-labeled points (kept out of band)
  LabeledCloud relabeled;    ///< input cloud with refined labels, landing/gutter restored

  [[nodiscard]] const std::vector<int>& points_of(int comp) const {
    return assigned[static_cast<std::size_t>(comp)];
  }

  /// Base-cloud geometry (relabeled keeps the input point order).
  [[nodiscard]] const std::vector<Point3>& points() const { return relabeled.points; }
};

/// Per-stage assignment snapshots (-1 = unassigned, else component index),
/// captured when a trace sink is passed to refine_components. The filter
/// stages only ever remove, so after_c through after_f form an inclusion
/// chain under after_b.
struct RefineTrace {
  std::vector<int> initial;  ///< membership straight after the merge (stage-A state)
  std::vector<int> after_b;
  std::vector<int> after_c;
  std::vector<int> after_d;
  std::vector<int> after_e;
  std::vector<int> after_f;
  refpoint::Separators separators;  ///< post-C separators bounding the bottom-line sample
  Line2 bottom;                     ///< interleaved bottom line (center side positive)
};

/// Folds the warning surface into the center ramp (the two are analyzed as
/// one component) and moves Landing/Gutter labels to Unassigned; flare
/// labels pass through. Throws MissingComponent when no center-ramp points
/// remain after the merge.
inline LabeledCloud merge_warning_surface(const LabeledCloud& cloud) {
  LabeledCloud out = cloud;
  bool has_center = false;
  for (auto& l : out.labels) {
    if (l == ComponentLabel::WarningSurface) l = ComponentLabel::CenterRamp;
    if (l == ComponentLabel::Landing || l == ComponentLabel::Gutter)
      l = ComponentLabel::Unassigned;
    if (l == ComponentLabel::CenterRamp) has_center = true;
  }
  if (!has_center)
    raise(ErrorCode::MissingComponent, "no center-ramp points after the merge");
  return out;
}

/// Index lists of the three components in a merged cloud.
inline std::array<std::vector<int>, 3> component_members(const LabeledCloud& merged) {
  std::array<std::vector<int>, 3> members;
  for (std::size_t i = 0; i < merged.labels.size(); ++i) {
    switch (merged.labels[i]) {
      case ComponentLabel::CenterRamp:
        members[kCenter].push_back(static_cast<int>(i));
        break;
      case ComponentLabel::LeftFlare:
        members[kLeftFlare].push_back(static_cast<int>(i));
        break;
      case ComponentLabel::RightFlare:
        members[kRightFlare].push_back(static_cast<int>(i));
        break;
      default:
        break;
    }
  }
  return members;
}

/// Stage A: one OCSVM coreset per component over its labeled points.
/// Throws TooFewPoints when a component has fewer than 10 points and
/// EmptyCoreset when the decision function rejects everything.
inline std::array<std::vector<int>, 3> extract_coresets(const LabeledCloud& merged,
                                                        const RefineParams& prm) {
  const auto members = component_members(merged);
  std::array<std::vector<int>, 3> coresets;
  for (int c = 0; c < kNumComponents; ++c) {
    const auto& idx = members[static_cast<std::size_t>(c)];
    if (idx.size() < 10)
      raise(ErrorCode::TooFewPoints,
            std::string(component_name(c)) + " has " + std::to_string(idx.size()) +
                " points (coreset needs >= 10)");
    ml::OcsvmParams op;
    op.nu = prm.nu;
    op.gamma = prm.gamma;
    op.seed = derive_seed(prm.seed, std::string("coreset.") + component_name(c));
    const auto model = ml::ocsvm_fit(merged.points, idx, op);
    coresets[static_cast<std::size_t>(c)] = ml::ocsvm_coreset(merged.points, idx, model);
  }
  return coresets;
}

/// Stage B: assigns every universe point to the argmin-distance plane when
/// that distance is below t, otherwise leaves it unassigned. Previous labels
/// do not matter; ties break toward the lower component index.
inline std::vector<int> reassign_by_plane(const std::vector<Point3>& pts,
                                          const std::vector<char>& universe,
                                          const std::array<Plane, 3>& planes,
                                          double t) {
  if (universe.size() != pts.size())
    raise(ErrorCode::InvalidParam, "universe mask size mismatch");
  if (t <= 0.0) raise(ErrorCode::InvalidParam, "plane distance threshold must be positive");
  std::vector<int> assign(pts.size(), -1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!universe[i]) continue;
    int best = 0;
    double best_d = std::abs(planes[0].signed_distance(pts[i]));
    for (int c = 1; c < kNumComponents; ++c) {
      const double d = std::abs(planes[static_cast<std::size_t>(c)].signed_distance(pts[i]));
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    if (best_d < t) assign[i] = best;
  }
  return assign;
}

/// Stage C: removes points lying on the wrong side of another component's
/// plane, "wrong" judged against the owning component's coreset centroid.
/// All six ordered pairs apply; a zero projection (point or centroid exactly
/// on the plane) carries no evidence and never removes.
inline void cross_filter_halfspaces(const std::vector<Point3>& pts,
                                    std::vector<int>& assign,
                                    const std::array<Plane, 3>& planes,
                                    const std::array<Vec3, 3>& centroids) {
  if (assign.size() != pts.size())
    raise(ErrorCode::InvalidParam, "assignment size mismatch");
  // reference projections n_j . c_i - n_j . c_j for every ordered pair
  std::array<std::array<double, 3>, 3> side{};
  for (int i = 0; i < kNumComponents; ++i)
    for (int j = 0; j < kNumComponents; ++j)
      side[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          planes[static_cast<std::size_t>(j)].normal.dot(
              centroids[static_cast<std::size_t>(i)] - centroids[static_cast<std::size_t>(j)]);
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const int i = assign[p];
    if (i < 0) continue;
    for (int j = 0; j < kNumComponents; ++j) {
      if (j == i) continue;
      const double proj = planes[static_cast<std::size_t>(j)].normal.dot(
          pts[p].pos() - centroids[static_cast<std::size_t>(j)]);
      if (proj * side[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] < 0.0) {
        assign[p] = -1;
        break;
      }
    }
  }
}

/// Stage D: keeps only the quadrant of the center coreset centroid, where
/// quadrants are cut by the vertical plane through the bottom line and the
/// horizontal plane through the lowest center points near that line (5th
/// percentile of z within 0.5 ft of the line, minus a 0.05 ft margin so the
/// ramp's own bottom row is never eroded). Points exactly on a cutting
/// plane are retained. Throws DegenerateGeometry on a zero-length line and
/// AmbiguousQuadrant when the centroid itself sits on a cutting plane.
inline void quadrant_filter(const std::vector<Point3>& pts,
                            std::vector<int>& assign,
                            const Line2& bottom,
                            const Vec3& center_centroid) {
  if (assign.size() != pts.size())
    raise(ErrorCode::InvalidParam, "assignment size mismatch");
  if (std::hypot(bottom.a, bottom.b) < 1e-12)
    raise(ErrorCode::DegenerateGeometry, "quadrant filter: zero-length bottom line");
  const Line2 bl = bottom.normalized();

  std::vector<double> near_z;
  std::vector<double> all_z;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (assign[i] != kCenter) continue;
    all_z.push_back(pts[i].z);
    if (std::abs(bl.eval(pts[i].xy())) <= 0.5) near_z.push_back(pts[i].z);
  }
  if (all_z.empty())
    raise(ErrorCode::MissingComponent, "quadrant filter: no center-ramp points");
  const double z0 = quantile(near_z.empty() ? all_z : near_z, 0.05) - 0.05;

  const double s1c = bl.eval(center_centroid.x(), center_centroid.y());
  const double s2c = center_centroid.z() - z0;
  if (std::abs(s1c) <= 1e-12 || std::abs(s2c) <= 1e-12)
    raise(ErrorCode::AmbiguousQuadrant,
          "center centroid lies on a quadrant plane");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (assign[i] < 0) continue;
    const double s1 = bl.eval(pts[i].xy());
    const double s2 = pts[i].z - z0;
    if (s1 * s1c < 0.0 || s2 * s2c < 0.0) assign[i] = -1;
  }
}

/// Stage E: removes assigned points whose local plane normal strays from
/// their component plane normal. The neighborhood around p is biased inward:
/// only points within r of p that are no farther from the component's
/// coreset centroid than p itself. Neighborhoods draw on the whole cloud
/// (assigned or not); p belongs to its own neighborhood. Fewer than 5
/// members retain the point (sparse regions carry no local evidence).
inline void normal_consistency_filter(const std::vector<Point3>& pts,
                                      std::vector<int>& assign,
                                      const std::array<Plane, 3>& planes,
                                      const std::array<Vec3, 3>& centroids,
                                      const RefineParams& prm) {
  if (assign.size() != pts.size())
    raise(ErrorCode::InvalidParam, "assignment size mismatch");
  constexpr std::size_t kMinNeighborhood = 5;
  const ml::SpatialGrid grid(pts, prm.neighbor_radius);
  std::vector<int> hood;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const int i = assign[p];
    if (i < 0) continue;
    const Vec3& ci = centroids[static_cast<std::size_t>(i)];
    const double dc = (pts[p].pos() - ci).norm();
    hood.clear();
    for (int q : grid.radius_indices(pts[p].pos(), prm.neighbor_radius))
      if ((pts[static_cast<std::size_t>(q)].pos() - ci).norm() <= dc) hood.push_back(q);
    if (hood.size() < kMinNeighborhood) continue;
    const Vec3 local = ml::fit_normal(pts, hood);
    if (std::abs(local.dot(planes[static_cast<std::size_t>(i)].normal)) < prm.s_crit)
      assign[p] = -1;
  }
}

/// Stage F: isolation-forest removal over the whole assigned set (exact
/// contamination quota), then DBSCAN over the survivors keeping only the
/// largest cluster (ties toward the lower cluster id). Throws EmptyResult
/// when any component ends up empty.
inline void final_cleanup(const std::vector<Point3>& pts,
                          std::vector<int>& assign,
                          const RefineParams& prm) {
  if (assign.size() != pts.size())
    raise(ErrorCode::InvalidParam, "assignment size mismatch");
  auto gather = [&] {
    std::vector<int> idx;
    for (std::size_t i = 0; i < assign.size(); ++i)
      if (assign[i] >= 0) idx.push_back(static_cast<int>(i));
    return idx;
  };

  std::vector<int> idx = gather();
  if (!idx.empty() && prm.contamination > 0.0) {
    std::vector<Point3> sub;
    sub.reserve(idx.size());
    for (int i : idx) sub.push_back(pts[static_cast<std::size_t>(i)]);
    ml::IforestParams ip;
    ip.n_trees = prm.iforest_trees;
    ip.subsample = prm.iforest_subsample;
    ip.contamination = prm.contamination;
    ip.seed = derive_seed(prm.seed, "iforest");
    const auto flags = ml::iforest_flag(sub, ip);
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (flags[k]) assign[static_cast<std::size_t>(idx[k])] = -1;
    idx = gather();
  }

  if (!idx.empty()) {
    std::vector<Point3> sub;
    sub.reserve(idx.size());
    for (int i : idx) sub.push_back(pts[static_cast<std::size_t>(i)]);
    ml::DbscanParams dp;
    dp.eps = prm.dbscan_eps;
    dp.min_pts = prm.dbscan_min_pts;
    const auto labels = ml::dbscan(sub, dp);
    const auto keep = ml::largest_cluster(labels);
    std::vector<char> keep_mask(idx.size(), 0);
    for (int k : keep) keep_mask[static_cast<std::size_t>(k)] = 1;
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (!keep_mask[k]) assign[static_cast<std::size_t>(idx[k])] = -1;
  }

  std::array<std::size_t, 3> counts{};
  for (int a : assign)
    if (a >= 0) ++counts[static_cast<std::size_t>(a)];
  for (int c = 0; c < kNumComponents; ++c)
    if (counts[static_cast<std::size_t>(c)] == 0)
      raise(ErrorCode::EmptyResult,
            std::string(component_name(c)) + " vanished in the final cleanup");
}

namespace detail {

template <typename Fn>
auto stage(const char* tag, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(tag) + ": " + e.what());
  }
}

/// Cloud labels for an assignment snapshot; out-of-band landing/gutter
/// points keep their original labels in every snapshot.
inline LabeledCloud snapshot_cloud(const LabeledCloud& base,
                                   const std::vector<int>& assign,
                                   const std::vector<int>& landing,
                                   const std::vector<int>& gutter) {
  LabeledCloud out;
  out.id = base.id;
  out.points = base.points;
  out.labels.assign(base.points.size(), ComponentLabel::Unassigned);
  for (std::size_t i = 0; i < assign.size(); ++i)
    if (assign[i] >= 0) out.labels[i] = component_label(assign[i]);
  for (int i : landing) out.labels[static_cast<std::size_t>(i)] = ComponentLabel::Landing;
  for (int i : gutter) out.labels[static_cast<std::size_t>(i)] = ComponentLabel::Gutter;
  return out;
}

inline void maybe_dump(const std::string& prefix, char letter,
                       const LabeledCloud& base, const std::vector<int>& assign,
                       const std::vector<int>& landing, const std::vector<int>& gutter) {
  if (prefix.empty()) return;
  save_lpc(prefix + "." + letter + ".lpc", snapshot_cloud(base, assign, landing, gutter));
}

}  // namespace detail

/// Runs the refinement stages A through F in order, with the bottom-line
/// fit interleaved between the half-space and quadrant filters. Landing and
/// Gutter points sit out the refinement (their labels come back in the
/// relabeled output) but do feed the bottom-line street sample and the
/// local-normal neighborhoods. Deterministic for a fixed seed. When
/// `dump_prefix` is nonempty an LPC snapshot is written after each stage
/// (suffixes .A.lpc through .F.lpc).
inline RefinedComponents refine_components(const LabeledCloud& cloud,
                                           const RefineParams& prm,
                                           RefineTrace* trace = nullptr,
                                           const std::string& dump_prefix = "") {
  prm.validate();
  if (cloud.empty()) raise(ErrorCode::EmptyCloud, "refine of an empty cloud");

  RefinedComponents rc;
  rc.landing = cloud.indices_of(ComponentLabel::Landing);
  rc.gutter = cloud.indices_of(ComponentLabel::Gutter);

  const LabeledCloud merged = merge_warning_surface(cloud);
  const auto members = component_members(merged);
  if (members[kLeftFlare].empty() && members[kRightFlare].empty())
    raise(ErrorCode::MissingComponent, "no flare points in the input");
  const std::vector<Point3>& pts = merged.points;

  // stage A: coresets, plane fits, centroids
  rc.coreset = detail::stage("stage A", [&] { return extract_coresets(merged, prm); });
  for (int c = 0; c < kNumComponents; ++c) {
    const auto& cs = rc.coreset[static_cast<std::size_t>(c)];
    rc.plane[static_cast<std::size_t>(c)] = detail::stage("stage A", [&] {
      try {
        return ml::fit_plane(pts, cs);
      } catch (const Error& e) {
        throw Error(e.code(), std::string(component_name(c)) + ": " + e.what());
      }
    });
    Vec3 sum = Vec3::Zero();
    for (int i : cs) sum += pts[static_cast<std::size_t>(i)].pos();
    rc.centroid[static_cast<std::size_t>(c)] = sum / static_cast<double>(cs.size());
  }
  {
    std::vector<int> initial(pts.size(), -1);
    for (int c = 0; c < kNumComponents; ++c)
      for (int i : members[static_cast<std::size_t>(c)]) initial[static_cast<std::size_t>(i)] = c;
    if (trace) trace->initial = initial;
    detail::maybe_dump(dump_prefix, 'A', merged, initial, rc.landing, rc.gutter);
  }

  // stage B universe: everything except the out-of-band landing/gutter points
  std::vector<char> universe(pts.size(), 1);
  for (int i : rc.landing) universe[static_cast<std::size_t>(i)] = 0;
  for (int i : rc.gutter) universe[static_cast<std::size_t>(i)] = 0;

  std::vector<int> assign = detail::stage("stage B", [&] {
    return reassign_by_plane(pts, universe, rc.plane, prm.plane_dist_t);
  });
  if (trace) trace->after_b = assign;
  detail::maybe_dump(dump_prefix, 'B', merged, assign, rc.landing, rc.gutter);

  detail::stage("stage C", [&] {
    cross_filter_halfspaces(pts, assign, rc.plane, rc.centroid);
    return 0;
  });
  if (trace) trace->after_c = assign;
  detail::maybe_dump(dump_prefix, 'C', merged, assign, rc.landing, rc.gutter);

  // interleaved bottom-line fit on the post-C state: separators between each
  // flare and the center bound the street sample laterally
  const Line2 bottom = detail::stage("bottom-line", [&] {
    std::array<std::vector<Point3>, 3> comp;
    std::vector<Point3> rest;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (assign[i] >= 0)
        comp[static_cast<std::size_t>(assign[i])].push_back(pts[i]);
      else
        rest.push_back(pts[i]);
    }
    for (int c = 0; c < kNumComponents; ++c)
      if (comp[static_cast<std::size_t>(c)].empty())
        raise(ErrorCode::EmptyResult,
              std::string(component_name(c)) + " vanished before the bottom-line fit");
    const auto center_xy = refpoint::detail::to_xy(comp[kCenter]);
    const auto left_xy = refpoint::detail::to_xy(comp[kLeftFlare]);
    const auto right_xy = refpoint::detail::to_xy(comp[kRightFlare]);
    refpoint::Separators seps;
    seps.left = refpoint::fit_separator(left_xy, center_xy, prm.sblf_cap,
                                        derive_seed(prm.seed, "sep.left"));
    seps.right = refpoint::fit_separator(right_xy, center_xy, prm.sblf_cap,
                                         derive_seed(prm.seed, "sep.right"));
    refpoint::orient_separators(seps, refpoint::detail::centroid_xy(comp[kLeftFlare]),
                                refpoint::detail::centroid_xy(comp[kRightFlare]));
    const Line2 bl = refpoint::fit_bottom_line(comp[kCenter], rest, seps.left, seps.right,
                                               prm.sblf_cap, derive_seed(prm.seed, "bottom"));
    if (trace) trace->separators = seps;
    return bl;
  });
  if (trace) trace->bottom = bottom;

  detail::stage("stage D", [&] {
    quadrant_filter(pts, assign, bottom, rc.centroid[kCenter]);
    return 0;
  });
  if (trace) trace->after_d = assign;
  detail::maybe_dump(dump_prefix, 'D', merged, assign, rc.landing, rc.gutter);

  detail::stage("stage E", [&] {
    normal_consistency_filter(pts, assign, rc.plane, rc.centroid, prm);
    return 0;
  });
  if (trace) trace->after_e = assign;
  detail::maybe_dump(dump_prefix, 'E', merged, assign, rc.landing, rc.gutter);

  detail::stage("stage F", [&] {
    final_cleanup(pts, assign, prm);
    return 0;
  });
  if (trace) trace->after_f = assign;

  for (std::size_t i = 0; i < assign.size(); ++i) {
    if (assign[i] >= 0)
      rc.assigned[static_cast<std::size_t>(assign[i])].push_back(static_cast<int>(i));
    else
      rc.unassigned.push_back(static_cast<int>(i));
  }
  rc.relabeled = detail::snapshot_cloud(cloud, assign, rc.landing, rc.gutter);
  detail::maybe_dump(dump_prefix, 'F', merged, assign, rc.landing, rc.gutter);
  return rc;
}

}  // namespace curbscan::refine
