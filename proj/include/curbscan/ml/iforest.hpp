#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "curbscan/core/util.hpp"
#include "curbscan/core/types.hpp"

namespace curbscan::ml {

/// @brief Isolation-forest parameters.
struct IforestParams {
  int n_trees = 100;
  int subsample = 256;          ///< per-tree sample size psi (capped at n)
  double contamination = 0.02;  ///< flag exactly ceil(contamination * n) points
  std::uint64_t seed = 0;
};

namespace detail {

/// Average unsuccessful-search path length in a BST of n nodes.
inline double iforest_c(double n) {
  if (n <= 1.0) return 0.0;
  if (n == 2.0) return 1.0;
  const double h = std::log(n - 1.0) + 0.5772156649015329;
  return 2.0 * h - 2.0 * (n - 1.0) / n;
}

struct IforestNode {
  int dim = -1;       // -1 marks a leaf
  double split = 0.0;
  int left = -1;
  int right = -1;
  int size = 0;       // leaf population
};

struct IforestTree {
  std::vector<IforestNode> nodes;

  [[nodiscard]] double path_length(const Vec3& p) const {
    int id = 0;
    double depth = 0.0;
    while (nodes[static_cast<std::size_t>(id)].dim >= 0) {
      const auto& nd = nodes[static_cast<std::size_t>(id)];
      id = p(nd.dim) < nd.split ? nd.left : nd.right;
      depth += 1.0;
    }
    return depth + iforest_c(static_cast<double>(nodes[static_cast<std::size_t>(id)].size));
  }
};

inline int build_iforest_node(IforestTree& tree, const std::vector<Point3>& pts,
                              std::vector<int>& idx, int lo, int hi, int depth,
                              int limit, std::mt19937_64& rng) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  const int count = hi - lo;
  if (count <= 1 || depth >= limit) {
    tree.nodes[static_cast<std::size_t>(id)].size = count;
    return id;
  }
  // choose a split axis with spread; give up after trying all three
  int dims[3] = {0, 1, 2};
  std::shuffle(dims, dims + 3, rng);
  int dim = -1;
  double vmin = 0.0, vmax = 0.0;
  for (int d : dims) {
    vmin = vmax = pts[static_cast<std::size_t>(idx[static_cast<std::size_t>(lo)])].pos()(d);
    for (int i = lo + 1; i < hi; ++i) {
      const double v = pts[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])].pos()(d);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    if (vmax - vmin > 1e-12) {
      dim = d;
      break;
    }
  }
  if (dim < 0) {  // all coincident
    tree.nodes[static_cast<std::size_t>(id)].size = count;
    return id;
  }
  std::uniform_real_distribution<double> u(vmin, vmax);
  const double split = u(rng);
  const auto mid_it = std::partition(
      idx.begin() + lo, idx.begin() + hi, [&](int i) {
        return pts[static_cast<std::size_t>(i)].pos()(dim) < split;
      });
  int mid = static_cast<int>(mid_it - idx.begin());
  if (mid == lo || mid == hi) {  // degenerate draw; fall back to midpoint
    const double half = 0.5 * (vmin + vmax);
    const auto it2 = std::partition(idx.begin() + lo, idx.begin() + hi, [&](int i) {
      return pts[static_cast<std::size_t>(i)].pos()(dim) < half;
    });
    mid = static_cast<int>(it2 - idx.begin());
    if (mid == lo || mid == hi) {
      tree.nodes[static_cast<std::size_t>(id)].size = count;
      return id;
    }
    tree.nodes[static_cast<std::size_t>(id)].split = half;
  } else {
    tree.nodes[static_cast<std::size_t>(id)].split = split;
  }
  tree.nodes[static_cast<std::size_t>(id)].dim = dim;
  const int l = build_iforest_node(tree, pts, idx, lo, mid, depth + 1, limit, rng);
  const int r = build_iforest_node(tree, pts, idx, mid, hi, depth + 1, limit, rng);
  tree.nodes[static_cast<std::size_t>(id)].left = l;
  tree.nodes[static_cast<std::size_t>(id)].right = r;
  return id;
}

}  // namespace detail

/// Anomaly scores in [0, 1] (higher = more isolated), one per input point.
/// Throws TooFewPoints (< 8) and InvalidParam.
inline std::vector<double> iforest_scores(const std::vector<Point3>& pts,
                                          const IforestParams& prm) {
  const int n = static_cast<int>(pts.size());
  if (n < 8) raise(ErrorCode::TooFewPoints, "isolation forest needs >= 8 points");
  if (prm.n_trees < 1 || prm.subsample < 2)
    raise(ErrorCode::InvalidParam, "bad forest shape");
  const int psi = std::min(prm.subsample, n);
  const int limit = static_cast<int>(std::ceil(std::log2(static_cast<double>(psi))));

  std::vector<detail::IforestTree> trees(static_cast<std::size_t>(prm.n_trees));
  for (int t = 0; t < prm.n_trees; ++t) {
    std::mt19937_64 rng(derive_seed(prm.seed, "iforest") + static_cast<std::uint64_t>(t));
    std::vector<int> idx =
        sample_without_replacement(n, psi, rng());
    detail::build_iforest_node(trees[static_cast<std::size_t>(t)], pts, idx, 0,
                               psi, 0, limit, rng);
  }
  const double denom = detail::iforest_c(static_cast<double>(psi));
  std::vector<double> scores(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (const auto& tr : trees) sum += tr.path_length(pts[static_cast<std::size_t>(i)].pos());
    const double avg = sum / static_cast<double>(prm.n_trees);
    scores[static_cast<std::size_t>(i)] = std::pow(2.0, -avg / denom);
  }
  return scores;
}

/// Flags exactly ceil(contamination * n) points as outliers by descending
/// score; score ties resolve toward the lower index. Returns 0/1 flags.
inline std::vector<char> iforest_flag(const std::vector<Point3>& pts,
                                      const IforestParams& prm) {
  if (prm.contamination < 0.0 || prm.contamination > 0.5)
    raise(ErrorCode::InvalidParam, "contamination out of [0, 0.5]");
  const auto scores = iforest_scores(pts, prm);
  const int n = static_cast<int>(pts.size());
  const int q = static_cast<int>(std::ceil(prm.contamination * n));
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    const double si = scores[static_cast<std::size_t>(i)];
    const double sj = scores[static_cast<std::size_t>(j)];
    return si > sj || (si == sj && i < j);
  });
  std::vector<char> flags(static_cast<std::size_t>(n), 0);
  for (int k = 0; k < q && k < n; ++k)
    flags[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = 1;
  return flags;
}

}  // namespace curbscan::ml
