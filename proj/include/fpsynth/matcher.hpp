// Minutiae matcher: coarse Hough voting over (rotation, translation)
// recovers the relative placement, then one-to-one greedy pairing inside
// fixed distance/angle gates yields a similarity score. Scores are on
// the toolkit's own 0..100 scale, not any commercial SDK's.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "fpsynth/core.hpp"
#include "fpsynth/minutiae.hpp"

namespace fpsynth {

struct RigidAlignment {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;  // radians
  int votes = 0;
};

struct MatchScore {
  double value = 0.0;
  int supporting_pairs = 0;
};

namespace matcher_detail {

// Rotation covers the worst relative pose two impressions can carry
// (each is placed within +-30 deg, so their relative rotation reaches
// 60 deg); translation covers placement plus elastic drift.
inline constexpr double kMaxRotation = deg_to_rad(64.0);
inline constexpr double kRotBin = deg_to_rad(4.0);
inline constexpr double kMaxShift = 60.0;
inline constexpr double kShiftBin = 8.0;
inline constexpr double kPairDist = 12.0;
inline constexpr double kPairAngle = deg_to_rad(20.0);

struct VoteGrid {
  // dims: rotation x shift x shift
  static constexpr int kRotBins = 33;   // +-16 around center
  static constexpr int kShiftBins = 17; // +-8 around center
  std::vector<int> counts;
  std::vector<double> sum_dx, sum_dy, sum_dt;
  std::vector<int> touched;

  VoteGrid()
      : counts(kRotBins * kShiftBins * kShiftBins, 0),
        sum_dx(counts.size(), 0.0),
        sum_dy(counts.size(), 0.0),
        sum_dt(counts.size(), 0.0) {}

  void clear() {
    for (int i : touched) {
      counts[i] = 0;
      sum_dx[i] = 0.0;
      sum_dy[i] = 0.0;
      sum_dt[i] = 0.0;
    }
    touched.clear();
  }

  void vote(double dt, double dx, double dy) {
    const int rb = static_cast<int>(std::floor(dt / kRotBin)) + kRotBins / 2;
    const int xb = static_cast<int>(std::floor(dx / kShiftBin)) + kShiftBins / 2;
    const int yb = static_cast<int>(std::floor(dy / kShiftBin)) + kShiftBins / 2;
    if (rb < 0 || rb >= kRotBins || xb < 0 || xb >= kShiftBins || yb < 0 ||
        yb >= kShiftBins) {
      return;
    }
    const int i = (rb * kShiftBins + xb) * kShiftBins + yb;
    if (counts[i] == 0) touched.push_back(i);
    counts[i] += 1;
    sum_dx[i] += dx;
    sum_dy[i] += dy;
    sum_dt[i] += dt;
  }
};

inline thread_local VoteGrid tls_grid;

}  // namespace matcher_detail

/// Estimates the rigid transform taking set `a` onto set `b` by voting
/// over rotation/translation bins; the winning neighbourhood's mean is
/// returned. Fewer than 3 minutiae on either side yields the identity
/// with zero votes.
inline RigidAlignment align(const MinutiaSet& a, const MinutiaSet& b) {
  using namespace matcher_detail;
  RigidAlignment result;
  if (a.size() < 3 || b.size() < 3) return result;

  VoteGrid& grid = tls_grid;
  grid.clear();

  const double c0 = kImageSize / 2.0;
  for (const Minutia& ma : a) {
    for (const Minutia& mb : b) {
      if (ma.kind != mb.kind) continue;
      const double dt = angle_diff(mb.angle, ma.angle);
      if (std::abs(dt) > kMaxRotation) continue;
      const double cs = std::cos(dt), sn = std::sin(dt);
      const double rx = ma.x - c0, ry = ma.y - c0;
      const double px = cs * rx - sn * ry + c0;
      const double py = sn * rx + cs * ry + c0;
      const double dx = mb.x - px;
      const double dy = mb.y - py;
      if (std::abs(dx) > kMaxShift || std::abs(dy) > kMaxShift) continue;
      grid.vote(dt, dx, dy);
    }
  }

  int best = -1;
  int best_count = 0;
  for (int i : grid.touched) {
    if (grid.counts[i] > best_count || (grid.counts[i] == best_count && i < best)) {
      best = i;
      best_count = grid.counts[i];
    }
  }
  if (best < 0) return result;

  // refine with the winning bin and its immediate neighbours
  const int yb = best % VoteGrid::kShiftBins;
  const int xb = (best / VoteGrid::kShiftBins) % VoteGrid::kShiftBins;
  const int rb = best / (VoteGrid::kShiftBins * VoteGrid::kShiftBins);
  int count = 0;
  double sdx = 0.0, sdy = 0.0, sdt = 0.0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dxb = -1; dxb <= 1; ++dxb) {
      for (int dyb = -1; dyb <= 1; ++dyb) {
        const int nr = rb + dr, nx = xb + dxb, ny = yb + dyb;
        if (nr < 0 || nr >= VoteGrid::kRotBins || nx < 0 || nx >= VoteGrid::kShiftBins ||
            ny < 0 || ny >= VoteGrid::kShiftBins) {
          continue;
        }
        const int i = (nr * VoteGrid::kShiftBins + nx) * VoteGrid::kShiftBins + ny;
        count += grid.counts[i];
        sdx += grid.sum_dx[i];
        sdy += grid.sum_dy[i];
        sdt += grid.sum_dt[i];
      }
    }
  }
  result.votes = best_count;
  result.dx = sdx / count;
  result.dy = sdy / count;
  result.dtheta = sdt / count;
  return result;
}

namespace matcher_detail {

inline double directed_score(const MinutiaSet& a, const MinutiaSet& b, int& pairs_out) {
  pairs_out = 0;
  if (a.empty() || b.empty()) return 0.0;

  const RigidAlignment t = align(a, b);
  const double cs = std::cos(t.dtheta), sn = std::sin(t.dtheta);
  const double c0 = kImageSize / 2.0;

  struct Cand {
    float dist;
    uint16_t i, j;
  };
  std::vector<Cand> cands;
  for (size_t i = 0; i < a.size(); ++i) {
    const double rx = a[i].x - c0, ry = a[i].y - c0;
    const double px = cs * rx - sn * ry + c0 + t.dx;
    const double py = sn * rx + cs * ry + c0 + t.dy;
    const double pa = a[i].angle + t.dtheta;
    for (size_t j = 0; j < b.size(); ++j) {
      if (a[i].kind != b[j].kind) continue;
      const double dx = b[j].x - px;
      const double dy = b[j].y - py;
      const double d2 = dx * dx + dy * dy;
      if (d2 > kPairDist * kPairDist) continue;
      if (std::abs(angle_diff(b[j].angle, pa)) > kPairAngle) continue;
      cands.push_back({static_cast<float>(d2), static_cast<uint16_t>(i),
                       static_cast<uint16_t>(j)});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    if (x.dist != y.dist) return x.dist < y.dist;
    if (x.i != y.i) return x.i < y.i;
    return x.j < y.j;
  });

  std::vector<uint8_t> used_a(a.size(), 0), used_b(b.size(), 0);
  int pairs = 0;
  for (const Cand& c : cands) {
    if (used_a[c.i] || used_b[c.j]) continue;
    used_a[c.i] = used_b[c.j] = 1;
    ++pairs;
  }
  pairs_out = pairs;
  return 100.0 * (static_cast<double>(pairs) * pairs) /
         (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace matcher_detail

/// Similarity between two minutiae sets: 100 * pairs^2 / (|a|*|b|) after
/// alignment. Computed in both directions and the larger kept, which
/// makes the score exactly symmetric. Empty input scores 0; a nonempty
/// set against itself scores 100.
inline MatchScore match(const MinutiaSet& a, const MinutiaSet& b) {
  int pairs_ab = 0, pairs_ba = 0;
  const double ab = matcher_detail::directed_score(a, b, pairs_ab);
  const double ba = matcher_detail::directed_score(b, a, pairs_ba);
  if (ab >= ba) return {ab, pairs_ab};
  return {ba, pairs_ba};
}

}  // namespace fpsynth
