#pragma once

#include <vector>

#include "curbscan/ml/spatial_grid.hpp"

namespace curbscan::ml {

/// @brief Density clustering parameters.
struct DbscanParams {
  double eps = 2.0;   ///< neighborhood radius (inclusive), feet
  int min_pts = 10;   ///< core threshold; the neighborhood count includes the point itself
};

/// DBSCAN with pinned deterministic semantics:
///  - p is core iff |{q : ||q - p|| <= eps}| >= min_pts (count includes p);
///  - clusters are the connected components of the core-core adjacency graph;
///  - a border point joins the cluster of its lowest-index core neighbor;
///  - points with no core neighbor are noise (-1);
///  - cluster ids are assigned by ascending lowest core index per component.
/// Returns per-point cluster ids. Throws InvalidParam on bad parameters.
inline std::vector<int> dbscan(const std::vector<Point3>& pts,
                               const DbscanParams& prm) {
  if (prm.eps <= 0.0) raise(ErrorCode::InvalidParam, "dbscan eps must be positive");
  if (prm.min_pts < 1) raise(ErrorCode::InvalidParam, "dbscan min_pts must be >= 1");
  const int n = static_cast<int>(pts.size());
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  if (n == 0) return label;

  // Neighborhoods are queried on the fly: materializing every list is
  // O(n * density) memory, which blows past a gigabyte on dense survey
  // clouds with the default 2 ft radius.
  SpatialGrid grid(pts, prm.eps);
  std::vector<char> core(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    core[static_cast<std::size_t>(i)] = grid.radius_count_at_least(
        pts[static_cast<std::size_t>(i)].pos(), prm.eps, prm.min_pts);

  // flood-fill core components in ascending seed order -> ids are canonical
  int next_id = 0;
  std::vector<int> stack;
  for (int i = 0; i < n; ++i) {
    if (!core[static_cast<std::size_t>(i)] || label[static_cast<std::size_t>(i)] != -1)
      continue;
    const int id = next_id++;
    label[static_cast<std::size_t>(i)] = id;
    stack.assign(1, i);
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      for (int q : grid.radius_indices(pts[static_cast<std::size_t>(p)].pos(), prm.eps)) {
        if (!core[static_cast<std::size_t>(q)] ||
            label[static_cast<std::size_t>(q)] != -1)
          continue;
        label[static_cast<std::size_t>(q)] = id;
        stack.push_back(q);
      }
    }
  }
  // border points attach to the lowest-index core neighbor
  for (int i = 0; i < n; ++i) {
    if (core[static_cast<std::size_t>(i)]) continue;
    for (int q : grid.radius_indices(pts[static_cast<std::size_t>(i)].pos(), prm.eps)) {
      if (core[static_cast<std::size_t>(q)]) {  // ascending -> lowest index
        label[static_cast<std::size_t>(i)] = label[static_cast<std::size_t>(q)];
        break;
      }
    }
  }
  return label;
}

/// Indices of the largest cluster (ties -> lowest cluster id); empty when
/// everything is noise.
inline std::vector<int> largest_cluster(const std::vector<int>& labels) {
  int max_id = -1;
  for (int l : labels) max_id = std::max(max_id, l);
  if (max_id < 0) return {};
  std::vector<int> count(static_cast<std::size_t>(max_id) + 1, 0);
  for (int l : labels)
    if (l >= 0) ++count[static_cast<std::size_t>(l)];
  int best = 0;
  for (int id = 1; id <= max_id; ++id)
    if (count[static_cast<std::size_t>(id)] > count[static_cast<std::size_t>(best)])
      best = id;
  std::vector<int> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == best) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace curbscan::ml
