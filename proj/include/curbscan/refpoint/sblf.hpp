#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "curbscan/core/error.hpp"
#include "curbscan/core/geom2d.hpp"
#include "curbscan/core/types.hpp"
#include "curbscan/core/util.hpp"

namespace curbscan::refpoint {

inline constexpr std::size_t kSblfDefaultCap = 200;

/// Points within this absolute distance of a (normalized) candidate line are
/// treated as correctly classified for either orientation: every candidate
/// passes through two cloud points whose residual is pure rounding noise, so
/// strict side tests would score them arbitrarily.
inline constexpr double kSblfOnLineTol = 1e-9;

/// Winning line of a score-based line fit plus its deterministic tie keys.
struct SblfResult {
  Line2 line;               ///< better orientation of the winning candidate
  long long score = -1;     ///< S_A + S_B (strict side counts)
  double misclassified_distance = 0.0;  ///< total |distance| of misscored points
  std::size_t candidate_index = 0;      ///< pair enumeration index
};

/// Score-based line fit: evaluates lines through all pairs of distinct
/// candidate points (C is subsampled to `cap` with the seeded sampler when
/// larger) and returns the line maximizing
///   S = |{p in A : a*px + b*py + c < 0}| + |{p in B : a*px + b*py + c > 0}|.
/// Both sign orientations of every candidate are scored. Ties break toward
/// the smaller total absolute distance of misscored points, then the earlier
/// candidate pair, then the un-flipped orientation.
inline SblfResult sblf_scored(const std::vector<Vec2>& A, const std::vector<Vec2>& B,
                              const std::vector<Vec2>& C,
                              std::size_t cap = kSblfDefaultCap,
                              std::uint64_t seed = 0) {
  if (A.empty() || B.empty())
    raise(ErrorCode::InvalidParam, "sblf: A and B must be nonempty");
  if (C.size() < 2) raise(ErrorCode::InvalidParam, "sblf: need >= 2 candidate points");
  if (cap < 2) raise(ErrorCode::InvalidParam, "sblf: cap must be >= 2");

  std::vector<Vec2> cand;
  if (C.size() > cap) {
    const auto keep = sample_without_replacement(C.size(), cap, seed);
    cand.reserve(cap);
    for (std::size_t i : keep) cand.push_back(C[i]);
  } else {
    cand = C;
  }

  SblfResult best;
  bool best_flipped = false;
  std::size_t index = 0;
  bool any_candidate = false;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    for (std::size_t j = i + 1; j < cand.size(); ++j, ++index) {
      const Vec2 d = cand[j] - cand[i];
      if (d.norm() < 1e-12) continue;  // coincident pair spans no line
      const Line2 l = line_through(cand[i], cand[j]);
      const double nrm = std::hypot(l.a, l.b);
      any_candidate = true;

      const double on_tol = kSblfOnLineTol * nrm;
      long long a_neg = 0, a_pos = 0, a_on = 0, b_neg = 0, b_pos = 0, b_on = 0;
      double dist_a_neg = 0.0, dist_a_pos = 0.0, dist_b_neg = 0.0, dist_b_pos = 0.0;
      for (const Vec2& p : A) {
        const double e = l.eval(p);
        if (e < -on_tol) {
          ++a_neg;
          dist_a_neg += -e;
        } else if (e > on_tol) {
          ++a_pos;
          dist_a_pos += e;
        } else {
          ++a_on;
        }
      }
      for (const Vec2& p : B) {
        const double e = l.eval(p);
        if (e < -on_tol) {
          ++b_neg;
          dist_b_neg += -e;
        } else if (e > on_tol) {
          ++b_pos;
          dist_b_pos += e;
        } else {
          ++b_on;
        }
      }
      // orientation as constructed: A wants e < 0, B wants e > 0; on-line
      // points are counted as correct for both orientations
      const long long s_fwd = a_neg + a_on + b_pos + b_on;
      const double mis_fwd = (dist_a_pos + dist_b_neg) / nrm;
      // flipped orientation swaps the wanted sides
      const long long s_rev = a_pos + a_on + b_neg + b_on;
      const double mis_rev = (dist_a_neg + dist_b_pos) / nrm;

      const bool rev_better =
          s_rev > s_fwd || (s_rev == s_fwd && mis_rev < mis_fwd);
      const long long s = rev_better ? s_rev : s_fwd;
      const double mis = rev_better ? mis_rev : mis_fwd;
      if (s > best.score || (s == best.score && mis < best.misclassified_distance)) {
        best.line = rev_better ? l.flipped() : l;
        best.score = s;
        best.misclassified_distance = mis;
        best.candidate_index = index;
        best_flipped = rev_better;
      }
    }
  }
  (void)best_flipped;
  if (!any_candidate)
    raise(ErrorCode::DegenerateCandidates, "sblf: all candidate points coincide");
  return best;
}

inline Line2 sblf(const std::vector<Vec2>& A, const std::vector<Vec2>& B,
                  const std::vector<Vec2>& C, std::size_t cap = kSblfDefaultCap,
                  std::uint64_t seed = 0) {
  return sblf_scored(A, B, C, cap, seed).line;
}

/// Coefficient-wise mean of two lines after normalizing both and aligning
/// the second's normal with the first (dot > 0), renormalized.
inline Line2 aligned_average(const Line2& u, const Line2& v) {
  Line2 a = u.normalized();
  Line2 b = v.normalized();
  if (a.a * b.a + a.b * b.b < 0.0) b = b.flipped();
  Line2 m{0.5 * (a.a + b.a), 0.5 * (a.b + b.b), 0.5 * (a.c + b.c)};
  if (std::hypot(m.a, m.b) < 1e-12)
    raise(ErrorCode::DegenerateAxis, "aligned_average: input normals cancel");
  return m.normalized();
}

}  // namespace curbscan::refpoint
