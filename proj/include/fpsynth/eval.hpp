// Evaluation harness: mated/non-mated pair protocols, TAR/FAR
// arithmetic, threshold search, score histograms, distribution
// comparison, and the streamed cross-dataset privacy scan. Pair scoring
// is pure, so every aggregate is independent of worker count and
// visitation order.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fpsynth/core.hpp"
#include "fpsynth/manifest.hpp"
#include "fpsynth/matcher.hpp"
#include "fpsynth/minutiae.hpp"
#include "fpsynth/parallel.hpp"
#include "fpsynth/png_io.hpp"

namespace fpsynth {

using IndexPair = std::pair<uint32_t, uint32_t>;
using FeatureSet = std::vector<MinutiaSet>;

/// All unordered pairs sharing (subject, class) with distinct impression
/// indices, in deterministic manifest order.
inline std::vector<IndexPair> build_mated_pairs(const DatasetManifest& manifest) {
  std::map<std::pair<int64_t, int>, std::vector<uint32_t>> groups;
  for (uint32_t i = 0; i < manifest.records.size(); ++i) {
    const ManifestRecord& r = manifest.records[i];
    groups[{r.subject, r.finger_class.index()}].push_back(i);
  }
  std::vector<IndexPair> pairs;
  for (const auto& [key, members] : groups) {
    for (size_t i = 0; i < members.size(); ++i) {
      for (size_t j = i + 1; j < members.size(); ++j) {
        if (manifest.records[members[i]].impression ==
            manifest.records[members[j]].impression) {
          continue;
        }
        pairs.push_back({members[i], members[j]});
      }
    }
  }
  return pairs;
}

/// All unordered pairs whose subjects differ. Same-subject pairs are
/// excluded even across finger classes: a subject seed denotes the same
/// person everywhere.
inline std::vector<IndexPair> build_nonmated_pairs(const DatasetManifest& manifest) {
  const size_t n = manifest.records.size();
  std::vector<IndexPair> pairs;
  if (n >= 2) pairs.reserve(n * (n - 1) / 2);
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j = i + 1; j < n; ++j) {
      if (manifest.records[i].subject == manifest.records[j].subject) continue;
      pairs.push_back({i, j});
    }
  }
  return pairs;
}

/// Closed-form mated pair count: per (subject, class) group of size k
/// with distinct impressions, C(k, 2), minus pairs tied on impression.
inline uint64_t mated_pair_count(const DatasetManifest& manifest) {
  std::map<std::pair<int64_t, int>, std::map<int, uint64_t>> groups;
  for (const ManifestRecord& r : manifest.records) {
    groups[{r.subject, r.finger_class.index()}][r.impression] += 1;
  }
  uint64_t total = 0;
  for (const auto& [key, by_impression] : groups) {
    uint64_t k = 0;
    uint64_t same = 0;
    for (const auto& [imp, c] : by_impression) {
      k += c;
      same += c * (c - 1) / 2;
    }
    total += k * (k - 1) / 2 - same;
  }
  return total;
}

/// Closed-form non-mated pair count: C(N, 2) minus within-subject pairs.
inline uint64_t nonmated_pair_count(const DatasetManifest& manifest) {
  std::map<int64_t, uint64_t> by_subject;
  for (const ManifestRecord& r : manifest.records) by_subject[r.subject] += 1;
  const uint64_t n = manifest.records.size();
  uint64_t total = n * (n - 1) / 2;
  for (const auto& [s, c] : by_subject) total -= c * (c - 1) / 2;
  return total;
}

/// Size of the full cross join scanned by the privacy experiment.
inline uint64_t cross_pair_count(const DatasetManifest& a, const DatasetManifest& b) {
  return static_cast<uint64_t>(a.records.size()) * b.records.size();
}

/// Percentage of accepted comparisons: 100 * matches / total.
inline double far_percent(uint64_t matches, uint64_t total) {
  if (total == 0) throw std::invalid_argument("far_percent: zero comparisons");
  return 100.0 * static_cast<double>(matches) / static_cast<double>(total);
}

struct TarFarPoint {
  double threshold = 0.0;
  double tar = 0.0;  // %
  double far = 0.0;  // %
};

/// TAR/FAR at a threshold; ties at the threshold count as matches.
inline TarFarPoint tar_far(std::span<const double> genuine,
                           std::span<const double> imposter, double threshold) {
  if (genuine.empty()) throw std::invalid_argument("tar_far: genuine score list is empty");
  if (imposter.empty()) throw std::invalid_argument("tar_far: imposter score list is empty");
  uint64_t g = 0, f = 0;
  for (double s : genuine) g += s >= threshold;
  for (double s : imposter) f += s >= threshold;
  return {threshold, far_percent(g, genuine.size()), far_percent(f, imposter.size())};
}

struct ThresholdResult {
  double threshold = 0.0;
  bool saturated = false;  // no observed score met the target
};

/// Smallest observed score t with FAR(t) <= far_target (percent), by
/// sorted scan. If even the maximum score fails (ties at the top), the
/// result is an epsilon step above the maximum with the saturation flag
/// set.
inline ThresholdResult threshold_for_far(std::span<const double> imposter,
                                         double far_target) {
  if (far_target <= 0.0) throw std::invalid_argument("threshold_for_far: target must be > 0");
  if (imposter.empty()) throw std::invalid_argument("threshold_for_far: imposter list is empty");
  std::vector<double> sorted(imposter.begin(), imposter.end());
  std::sort(sorted.begin(), sorted.end());
  const uint64_t n = sorted.size();
  // scores >= sorted[i] is n - i once duplicates are skipped from the left
  for (size_t i = 0; i < n; ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;
    const double far = far_percent(n - i, n);
    if (far <= far_target) return {sorted[i], false};
  }
  const double top = sorted.back();
  return {top + 1e-9 * std::max(1.0, std::abs(top)), true};
}

struct ScoreDistribution {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<uint64_t> counts;
  uint64_t total = 0;
};

/// Equal-width histogram over [lo, hi]; the top edge is inclusive.
inline ScoreDistribution histogram(std::span<const double> scores, int bins, double lo,
                                   double hi) {
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  if (!(hi > lo)) throw std::invalid_argument("histogram: empty range");
  ScoreDistribution d;
  d.lo = lo;
  d.hi = hi;
  d.counts.assign(static_cast<size_t>(bins), 0);
  const double width = (hi - lo) / bins;
  for (double s : scores) {
    int b = static_cast<int>((s - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    d.counts[static_cast<size_t>(b)] += 1;
    d.total += 1;
  }
  return d;
}

/// Fixed equal-width binning over [0, max(scores)].
inline ScoreDistribution histogram(std::span<const double> scores, int bins) {
  double hi = 0.0;
  for (double s : scores) hi = std::max(hi, s);
  if (hi <= 0.0) hi = 1.0;  // degenerate all-zero input
  return histogram(scores, bins, 0.0, hi);
}

/// Total-variation distance between two normalized histograms sharing
/// the same binning, in [0, 1].
inline double uniqueness_compare(const ScoreDistribution& a, const ScoreDistribution& b) {
  if (a.counts.size() != b.counts.size() || a.lo != b.lo || a.hi != b.hi) {
    throw std::invalid_argument("uniqueness_compare: histograms use different binning");
  }
  if (a.total == 0 || b.total == 0) {
    throw std::invalid_argument("uniqueness_compare: empty distribution");
  }
  double tv = 0.0;
  for (size_t i = 0; i < a.counts.size(); ++i) {
    const double p = static_cast<double>(a.counts[i]) / a.total;
    const double q = static_cast<double>(b.counts[i]) / b.total;
    tv += std::abs(p - q);
  }
  return 0.5 * tv;
}

/// Extracts matcher features for every image, in manifest order.
inline FeatureSet extract_features(std::span<const GrayImage> images, int workers = 1) {
  FeatureSet features(images.size());
  parallel_for(images.size(), workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) features[i] = extract_from_image(images[i]);
  });
  return features;
}

inline FeatureSet extract_features(const DatasetManifest& manifest,
                                   const std::filesystem::path& root, int workers = 1) {
  FeatureSet features(manifest.records.size());
  parallel_for(manifest.records.size(), workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      features[i] = extract_from_image(read_png_gray8(root / manifest.records[i].path));
    }
  });
  return features;
}

/// Scores a pair list within one feature set. Scores land at the pair's
/// own index, so output is bit-identical for any worker count.
inline std::vector<double> score_pairs(const FeatureSet& features,
                                       std::span<const IndexPair> pairs, int workers = 1) {
  std::vector<double> scores(pairs.size(), 0.0);
  parallel_for(pairs.size(), workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      scores[i] = match(features[pairs[i].first], features[pairs[i].second]).value;
    }
  });
  return scores;
}

/// Scores a pair list across two feature sets (first index into a,
/// second into b).
inline std::vector<double> score_pairs(const FeatureSet& a, const FeatureSet& b,
                                       std::span<const IndexPair> pairs, int workers = 1) {
  std::vector<double> scores(pairs.size(), 0.0);
  parallel_for(pairs.size(), workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      scores[i] = match(a[pairs[i].first], b[pairs[i].second]).value;
    }
  });
  return scores;
}

struct PrivacyScanResult {
  uint64_t pairs_compared = 0;
  uint64_t matches_above_threshold = 0;
  double effective_far = 0.0;  // %
};

/// Scores the full cross join A x B and counts scores at or above the
/// threshold. Streams blocks of rows; memory stays O(block) and the
/// count is a commutative sum, so the result does not depend on worker
/// count or visitation order.
inline PrivacyScanResult privacy_scan(const FeatureSet& a, const FeatureSet& b,
                                      double threshold, int workers = 1) {
  PrivacyScanResult result;
  result.pairs_compared = static_cast<uint64_t>(a.size()) * b.size();
  if (result.pairs_compared == 0) {
    return result;
  }
  std::atomic<uint64_t> matches{0};
  parallel_for(a.size(), workers, [&](size_t begin, size_t end) {
    uint64_t local = 0;
    for (size_t i = begin; i < end; ++i) {
      for (size_t j = 0; j < b.size(); ++j) {
        if (match(a[i], b[j]).value >= threshold) ++local;
      }
    }
    matches.fetch_add(local, std::memory_order_relaxed);
  });
  result.matches_above_threshold = matches.load();
  result.effective_far = far_percent(result.matches_above_threshold, result.pairs_compared);
  return result;
}

}  // namespace fpsynth
