#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

#include "curbscan/core/error.hpp"

namespace curbscan {

/// FNV-1a 64-bit; pinned so per-ramp seeds are stable across platforms
/// (std::hash is implementation-defined).
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

/// Deterministic seed for a named stage of a named ramp.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  return base ^ fnv1a64(tag);
}

/// k distinct indices from [0, n), ascending, chosen by partial Fisher-Yates.
inline std::vector<int> sample_without_replacement(int n, int k,
                                                   std::uint64_t seed) {
  if (k < 0 || n < 0 || k > n)
    raise(ErrorCode::InvalidParam, "sample_without_replacement: k out of range");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Median of a copy; even count averages the middle pair.
inline double median(std::vector<double> v) {
  if (v.empty()) raise(ErrorCode::InvalidParam, "median of empty vector");
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  double hi = v[m];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m) - 1,
                   v.begin() + static_cast<std::ptrdiff_t>(m));
  return 0.5 * (v[m - 1] + hi);
}

/// q-quantile (q in [0,1]) by linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) raise(ErrorCode::InvalidParam, "quantile of empty vector");
  if (q < 0.0 || q > 1.0) raise(ErrorCode::InvalidParam, "quantile q out of [0,1]");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) raise(ErrorCode::InvalidParam, "mean of empty vector");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Population standard deviation.
inline double stddev_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace curbscan
