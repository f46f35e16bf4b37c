#pragma once

#include <cmath>
#include <vector>

#include "curbscan/core/util.hpp"
#include "curbscan/ml/fit.hpp"

namespace curbscan::ml {

/// @brief One-class SVM (RBF kernel) parameters.
struct OcsvmParams {
  double nu = 0.7;        ///< target inlier mass; must lie in (0, 1)
  double gamma = 0.0;     ///< RBF width; <= 0 selects 1 / (3 * pooled variance)
  int max_train = 2000;   ///< training subsample cap (seeded, without replacement)
  double tol = 1e-4;      ///< KKT violation stopping gap
  int max_iter = 200000;
  std::uint64_t seed = 0;
};

/// Fitted decision function f(x) = sum_i alpha_i k(x_i, x) - rho;
/// f >= 0 marks the dense region.
struct OcsvmModel {
  std::vector<Vec3> sv;
  std::vector<double> coef;
  double rho = 0.0;
  double gamma = 1.0;

  [[nodiscard]] double decision(const Vec3& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < sv.size(); ++i)
      s += coef[i] * std::exp(-gamma * (sv[i] - x).squaredNorm());
    return s - rho;
  }
};

/// Trains a nu-OCSVM on the subset of `pts` given by `idx` using SMO with
/// maximal-violating-pair working set selection on the scaled dual
/// (sum alpha = 1, 0 <= alpha_i <= 1/(nu*n)). Throws TooFewPoints (< 10),
/// InvalidNu, InvalidGamma, ZeroVariance (flat data with auto gamma) and
/// NonConvergence (iteration cap).
inline OcsvmModel ocsvm_fit(const std::vector<Point3>& pts,
                            const std::vector<int>& idx,
                            const OcsvmParams& prm) {
  if (idx.size() < 10) raise(ErrorCode::TooFewPoints, "ocsvm needs >= 10 points");
  if (!(prm.nu > 0.0 && prm.nu < 1.0)) raise(ErrorCode::InvalidNu, "nu must be in (0, 1)");
  if (prm.gamma < 0.0) raise(ErrorCode::InvalidGamma, "gamma must be >= 0");

  // seeded subsample keeps the kernel matrix bounded
  std::vector<int> train = idx;
  if (static_cast<int>(train.size()) > prm.max_train) {
    const auto keep = sample_without_replacement(
        static_cast<int>(train.size()), prm.max_train, derive_seed(prm.seed, "ocsvm"));
    std::vector<int> sub;
    sub.reserve(keep.size());
    for (int k : keep) sub.push_back(train[static_cast<std::size_t>(k)]);
    train.swap(sub);
  }
  const int n = static_cast<int>(train.size());
  const double gamma = prm.gamma > 0.0 ? prm.gamma : 1.0 / (3.0 * pooled_variance(pts, train));

  std::vector<Vec3> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = pts[static_cast<std::size_t>(train[static_cast<std::size_t>(i)])].pos();

  // kernel cache: float storage, double accumulation
  std::vector<float> q(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    q[static_cast<std::size_t>(i) * n + i] = 1.0f;
    for (int j = i + 1; j < n; ++j) {
      const float k = static_cast<float>(
          std::exp(-gamma * (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]).squaredNorm()));
      q[static_cast<std::size_t>(i) * n + j] = k;
      q[static_cast<std::size_t>(j) * n + i] = k;
    }
  }

  const double c = 1.0 / (prm.nu * n);
  std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
  const int full = static_cast<int>(std::floor(prm.nu * n));
  for (int i = 0; i < full && i < n; ++i) alpha[static_cast<std::size_t>(i)] = c;
  if (full < n) alpha[static_cast<std::size_t>(full)] = 1.0 - full * c;

  std::vector<double> g(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    if (alpha[static_cast<std::size_t>(j)] <= 0.0) continue;
    const float* row = &q[static_cast<std::size_t>(j) * n];
    const double aj = alpha[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] += aj * row[i];
  }

  const double bound_eps = 1e-12;
  bool converged = false;
  for (int iter = 0; iter < prm.max_iter; ++iter) {
    int i_up = -1, j_lo = -1;
    double g_min = 0.0, g_max = 0.0;
    for (int k = 0; k < n; ++k) {
      const double a = alpha[static_cast<std::size_t>(k)];
      const double gk = g[static_cast<std::size_t>(k)];
      if (a < c - bound_eps && (i_up < 0 || gk < g_min)) { i_up = k; g_min = gk; }
      if (a > bound_eps && (j_lo < 0 || gk > g_max)) { j_lo = k; g_max = gk; }
    }
    if (i_up < 0 || j_lo < 0 || g_max - g_min <= prm.tol) {
      converged = true;
      break;
    }
    const float* qi = &q[static_cast<std::size_t>(i_up) * n];
    const float* qj = &q[static_cast<std::size_t>(j_lo) * n];
    const double curve = std::max(
        1e-12, static_cast<double>(qi[i_up]) + qj[j_lo] - 2.0 * qi[j_lo]);
    double t = (g_max - g_min) / curve;
    t = std::min(t, std::min(c - alpha[static_cast<std::size_t>(i_up)],
                             alpha[static_cast<std::size_t>(j_lo)]));
    alpha[static_cast<std::size_t>(i_up)] += t;
    alpha[static_cast<std::size_t>(j_lo)] -= t;
    for (int k = 0; k < n; ++k)
      g[static_cast<std::size_t>(k)] += t * (static_cast<double>(qi[k]) - qj[k]);
  }
  if (!converged) raise(ErrorCode::NonConvergence, "ocsvm SMO hit the iteration cap");

  // rho: average gradient over free SVs, else midpoint of the bound bracket
  double rho;
  {
    double free_sum = 0.0;
    int free_count = 0;
    double at_c_max = -1e300, at_0_min = 1e300;
    for (int k = 0; k < n; ++k) {
      const double a = alpha[static_cast<std::size_t>(k)];
      const double gk = g[static_cast<std::size_t>(k)];
      if (a > bound_eps && a < c - bound_eps) { free_sum += gk; ++free_count; }
      else if (a >= c - bound_eps) at_c_max = std::max(at_c_max, gk);
      else at_0_min = std::min(at_0_min, gk);
    }
    if (free_count > 0) rho = free_sum / free_count;
    else if (at_c_max > -1e299 && at_0_min < 1e299) rho = 0.5 * (at_c_max + at_0_min);
    else if (at_c_max > -1e299) rho = at_c_max;
    else rho = at_0_min;
  }

  OcsvmModel model;
  model.gamma = gamma;
  model.rho = rho;
  for (int k = 0; k < n; ++k) {
    if (alpha[static_cast<std::size_t>(k)] > bound_eps) {
      model.sv.push_back(x[static_cast<std::size_t>(k)]);
      model.coef.push_back(alpha[static_cast<std::size_t>(k)]);
    }
  }
  return model;
}

/// Subset of `idx` whose points the model scores non-negative.
/// Throws EmptyCoreset when nothing qualifies.
inline std::vector<int> ocsvm_coreset(const std::vector<Point3>& pts,
                                      const std::vector<int>& idx,
                                      const OcsvmModel& model) {
  std::vector<int> out;
  for (int i : idx)
    if (model.decision(pts[static_cast<std::size_t>(i)].pos()) >= 0.0)
      out.push_back(i);
  if (out.empty()) raise(ErrorCode::EmptyCoreset, "decision function rejects all points");
  return out;
}

}  // namespace curbscan::ml
