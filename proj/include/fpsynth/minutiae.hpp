// Minutiae extraction and image quality metrics. The chain is classical:
// variance-based segmentation, gradient orientation estimation, oriented
// smoothing, local-mean binarization, morphological thinning, and
// crossing-number minutiae detection. All measures feeding the binary
// decisions are invariant to a constant brightness shift.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "fpsynth/core.hpp"
#include "fpsynth/image.hpp"
#include "fpsynth/manifest.hpp"
#include "fpsynth/orientation.hpp"
#include "fpsynth/parallel.hpp"
#include "fpsynth/png_io.hpp"

namespace fpsynth {

enum class MinutiaKind : uint8_t { RidgeEnding, Bifurcation };

struct Minutia {
  double x = 0.0;
  double y = 0.0;
  double angle = 0.0;  // [0, 2*pi)
  MinutiaKind kind = MinutiaKind::RidgeEnding;
  double reliability = 0.0;  // [0, 1]
};

using MinutiaSet = std::vector<Minutia>;

/// Binary ridge raster plus the foreground mask it is confined to.
struct RidgeMap {
  Bitmap ridges;
  Bitmap mask;
};

/// Block-variance foreground segmentation. A block belongs to the print
/// when its intensity spread is ridge-like; constant regions (blank
/// background) never qualify. Invariant to constant brightness shifts.
inline Bitmap segment_foreground(const GrayImage& img, int block_size = 16) {
  const int w = img.width(), h = img.height();
  const int bw = (w + block_size - 1) / block_size;
  const int bh = (h + block_size - 1) / block_size;
  std::vector<uint8_t> block_fg(static_cast<size_t>(bw) * bh, 0);
  constexpr double kStdThreshold = 9.0;

  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      double sum = 0.0, sq = 0.0;
      int n = 0;
      for (int y = by * block_size; y < std::min(h, (by + 1) * block_size); ++y) {
        for (int x = bx * block_size; x < std::min(w, (bx + 1) * block_size); ++x) {
          const double v = img.at(x, y);
          sum += v;
          sq += v * v;
          ++n;
        }
      }
      const double mean = sum / n;
      const double var = std::max(0.0, sq / n - mean * mean);
      block_fg[static_cast<size_t>(by) * bw + bx] = std::sqrt(var) >= kStdThreshold;
    }
  }

  // majority vote over the block neighbourhood knocks out speckle and
  // fills single-block holes
  std::vector<uint8_t> voted(block_fg.size(), 0);
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      int yes = 0, total = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = bx + dx, ny = by + dy;
          if (nx < 0 || nx >= bw || ny < 0 || ny >= bh) continue;
          ++total;
          yes += block_fg[static_cast<size_t>(ny) * bw + nx];
        }
      }
      const bool self = block_fg[static_cast<size_t>(by) * bw + bx];
      voted[static_cast<size_t>(by) * bw + bx] = (self && yes * 2 >= total) || yes * 4 >= total * 3;
    }
  }

  Bitmap mask(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      mask.at(x, y) = voted[static_cast<size_t>(y / block_size) * bw + x / block_size];
    }
  }
  return mask;
}

/// Ridge orientation from the smoothed gradient structure tensor, on a
/// block grid. Gradients of a constant-shifted image are unchanged, so
/// the estimate is brightness-shift invariant.
inline OrientationField estimate_orientation(const GrayImage& img, int block_size = 8) {
  const int w = img.width(), h = img.height();
  const int bw = (w + block_size - 1) / block_size;
  const int bh = (h + block_size - 1) / block_size;

  std::vector<double> jxx(static_cast<size_t>(bw) * bh, 0.0);
  std::vector<double> jxy(jxx.size(), 0.0);
  std::vector<double> jyy(jxx.size(), 0.0);

  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      // Sobel
      const double gx = (img.at(x + 1, y - 1) + 2.0 * img.at(x + 1, y) + img.at(x + 1, y + 1)) -
                        (img.at(x - 1, y - 1) + 2.0 * img.at(x - 1, y) + img.at(x - 1, y + 1));
      const double gy = (img.at(x - 1, y + 1) + 2.0 * img.at(x, y + 1) + img.at(x + 1, y + 1)) -
                        (img.at(x - 1, y - 1) + 2.0 * img.at(x, y - 1) + img.at(x + 1, y - 1));
      const size_t b = static_cast<size_t>(y / block_size) * bw + x / block_size;
      jxx[b] += gx * gx;
      jxy[b] += gx * gy;
      jyy[b] += gy * gy;
    }
  }

  // 3x3 tensor smoothing before the angle is read off
  OrientationField field(bw, bh, block_size);
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      double sxx = 0.0, sxy = 0.0, syy = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = bx + dx, ny = by + dy;
          if (nx < 0 || nx >= bw || ny < 0 || ny >= bh) continue;
          const size_t b = static_cast<size_t>(ny) * bw + nx;
          sxx += jxx[b];
          sxy += jxy[b];
          syy += jyy[b];
        }
      }
      // gradient direction + pi/2 = ridge direction
      const double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy) + kPi / 2.0;
      field.at_block(bx, by) = static_cast<float>(wrap_pi(angle));
    }
  }
  return field;
}

namespace detail {

// Box local mean over an arbitrary buffer via integral image, window
// renormalized at the borders.
inline std::vector<float> box_mean(const std::vector<float>& src, int w, int h, int radius) {
  std::vector<double> integral(static_cast<size_t>(w + 1) * (h + 1), 0.0);
  for (int y = 0; y < h; ++y) {
    double row = 0.0;
    for (int x = 0; x < w; ++x) {
      row += src[static_cast<size_t>(y) * w + x];
      integral[static_cast<size_t>(y + 1) * (w + 1) + x + 1] =
          integral[static_cast<size_t>(y) * (w + 1) + x + 1] + row;
    }
  }
  std::vector<float> out(static_cast<size_t>(w) * h, 0.0f);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - radius), y1 = std::min(h - 1, y + radius);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - radius), x1 = std::min(w - 1, x + radius);
      const double sum = integral[static_cast<size_t>(y1 + 1) * (w + 1) + x1 + 1] -
                         integral[static_cast<size_t>(y0) * (w + 1) + x1 + 1] -
                         integral[static_cast<size_t>(y1 + 1) * (w + 1) + x0] +
                         integral[static_cast<size_t>(y0) * (w + 1) + x0];
      const int area = (y1 - y0 + 1) * (x1 - x0 + 1);
      out[static_cast<size_t>(y) * w + x] = static_cast<float>(sum / area);
    }
  }
  return out;
}

// Gaussian smoothing along the local ridge direction. Off-raster taps
// are dropped and the kernel renormalized, which keeps the operator
// affine in the pixel values.
inline std::vector<float> oriented_smooth(const GrayImage& img, const OrientationField& field) {
  constexpr int kRadius = 5;
  constexpr double kSigma = 2.5;
  constexpr int kBins = 32;
  const int w = img.width(), h = img.height();

  struct Tap { int ox, oy; float w; };
  std::vector<std::vector<Tap>> taps(kBins);
  for (int b = 0; b < kBins; ++b) {
    const double theta = (b + 0.5) * kPi / kBins;
    for (int k = -kRadius; k <= kRadius; ++k) {
      Tap t;
      t.ox = static_cast<int>(std::lround(k * std::cos(theta)));
      t.oy = static_cast<int>(std::lround(k * std::sin(theta)));
      t.w = static_cast<float>(std::exp(-0.5 * k * k / (kSigma * kSigma)));
      taps[b].push_back(t);
    }
  }

  std::vector<float> out(static_cast<size_t>(w) * h, 0.0f);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double theta = field.angle_at(x, y);
      int b = static_cast<int>(theta / kPi * kBins);
      b = std::clamp(b, 0, kBins - 1);
      float acc = 0.0f, wsum = 0.0f;
      for (const Tap& t : taps[b]) {
        const int nx = x + t.ox, ny = y + t.oy;
        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
        acc += t.w * img.at(nx, ny);
        wsum += t.w;
      }
      out[static_cast<size_t>(y) * w + x] = acc / wsum;
    }
  }
  return out;
}

}  // namespace detail

/// Enhances and binarizes: ridge pixels are those darker than their
/// local neighbourhood after orientation-adaptive smoothing, confined to
/// the segmented foreground. A blank image yields an empty map.
inline RidgeMap enhance_and_binarize(const GrayImage& img) {
  const int w = img.width(), h = img.height();
  RidgeMap out;
  out.mask = segment_foreground(img);
  out.ridges = Bitmap(w, h);
  if (out.mask.count() == 0) return out;

  const OrientationField field = estimate_orientation(img);
  const std::vector<float> smooth = detail::oriented_smooth(img, field);
  const std::vector<float> local_mean = detail::box_mean(smooth, w, h, 7);

  constexpr float kMargin = 0.5f;  // keeps flat regions out of the map
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      out.ridges.at(x, y) = out.mask.at(x, y) && smooth[i] < local_mean[i] - kMargin;
    }
  }
  return out;
}

namespace detail {

// Number of 0->1 transitions around the 8-neighbourhood (the crossing
// number): 1 for a ridge ending, 3 for a bifurcation.
inline int crossing_number(const Bitmap& m, int x, int y) {
  const int v[8] = {m.test(x, y - 1),     m.test(x + 1, y - 1), m.test(x + 1, y),
                    m.test(x + 1, y + 1), m.test(x, y + 1),     m.test(x - 1, y + 1),
                    m.test(x - 1, y),     m.test(x - 1, y - 1)};
  int cn = 0;
  for (int i = 0; i < 8; ++i) cn += v[i] == 0 && v[(i + 1) % 8] == 1;
  return cn;
}

inline int neighbor_count(const Bitmap& m, int x, int y) {
  int n = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      n += m.test(x + dx, y + dy);
    }
  }
  return n;
}

}  // namespace detail

/// Morphological thinning (Zhang-Suen with a 2x2 staircase cleanup),
/// iterated to a fixed point so the result is idempotent. Connectivity
/// and the carried mask are preserved.
inline RidgeMap thin(const RidgeMap& in) {
  RidgeMap out{in.ridges, in.mask};
  Bitmap& m = out.ridges;
  const int w = m.width(), h = m.height();

  bool changed_any = true;
  while (changed_any) {
    changed_any = false;

    for (int phase = 0; phase < 2; ++phase) {
      bool changed = true;
      while (changed) {
        changed = false;
        std::vector<std::pair<int, int>> kill;
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            if (!m.at(x, y)) continue;
            const int b = detail::neighbor_count(m, x, y);
            if (b < 2 || b > 6) continue;
            if (detail::crossing_number(m, x, y) != 1) continue;
            const int p2 = m.test(x, y - 1), p4 = m.test(x + 1, y);
            const int p6 = m.test(x, y + 1), p8 = m.test(x - 1, y);
            const bool cond = phase == 0 ? (!(p2 && p4 && p6) && !(p4 && p6 && p8))
                                         : (!(p2 && p4 && p8) && !(p2 && p6 && p8));
            if (cond) kill.push_back({x, y});
          }
        }
        for (auto [x, y] : kill) m.at(x, y) = 0;
        if (!kill.empty()) changed = changed_any = true;
      }
    }

    // collapse remaining 2x2 blocks where removal keeps the skeleton
    // simply connected
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!m.at(x, y)) continue;
        const bool in_square =
            (m.test(x + 1, y) && m.test(x, y + 1) && m.test(x + 1, y + 1)) ||
            (m.test(x - 1, y) && m.test(x, y + 1) && m.test(x - 1, y + 1)) ||
            (m.test(x + 1, y) && m.test(x, y - 1) && m.test(x + 1, y - 1)) ||
            (m.test(x - 1, y) && m.test(x, y - 1) && m.test(x - 1, y - 1));
        if (!in_square) continue;
        if (detail::crossing_number(m, x, y) == 1 && detail::neighbor_count(m, x, y) >= 2) {
          m.at(x, y) = 0;
          changed_any = true;
        }
      }
    }
  }
  return out;
}

namespace detail {

// Walks the skeleton away from `start`, beginning at `first`, for up to
// `steps` pixels; returns the direction from the walk's end back toward
// the start (i.e. the ridge flow direction into the minutia).
inline Vec2 trace_direction(const Bitmap& m, std::pair<int, int> start,
                            std::pair<int, int> first, int steps) {
  auto [px, py] = start;
  auto [cx, cy] = first;
  for (int i = 1; i < steps; ++i) {
    int nx = -1, ny = -1;
    int options = 0;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int qx = cx + dx, qy = cy + dy;
        if (!m.test(qx, qy)) continue;
        if ((qx == px && qy == py) || (qx == start.first && qy == start.second)) continue;
        ++options;
        if (nx < 0) { nx = qx; ny = qy; }
      }
    }
    if (options != 1) break;  // branch point or dead end: stop the walk
    px = cx; py = cy;
    cx = nx; cy = ny;
  }
  const double dx = start.first - cx;
  const double dy = start.second - cy;
  const double n = std::sqrt(dx * dx + dy * dy);
  if (n == 0.0) return {1.0, 0.0};
  return {dx / n, dy / n};
}

}  // namespace detail

/// Crossing-number minutiae detection on a thinned skeleton. Candidates
/// within 8 px of the mask boundary are discarded as border artifacts;
/// close neighbours are deduplicated keeping the more reliable point.
inline MinutiaSet extract_minutiae(const RidgeMap& skeleton, const OrientationField& field) {
  const Bitmap& m = skeleton.ridges;
  const int w = m.width(), h = m.height();
  const Bitmap interior = erode(skeleton.mask, 8.0);

  MinutiaSet raw;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m.at(x, y) || !interior.test(x, y)) continue;
      const int cn = detail::crossing_number(m, x, y);
      if (cn != 1 && cn != 3) continue;

      std::vector<std::pair<int, int>> branches;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (m.test(x + dx, y + dy)) branches.push_back({x + dx, y + dy});
        }
      }

      Minutia mi;
      mi.x = x;
      mi.y = y;
      mi.kind = cn == 1 ? MinutiaKind::RidgeEnding : MinutiaKind::Bifurcation;
      mi.reliability = field.coherence_at(x, y);

      if (cn == 1) {
        const Vec2 d = detail::trace_direction(m, {x, y}, branches.front(), 6);
        mi.angle = wrap_two_pi(std::atan2(d.y, d.x));
      } else {
        std::vector<Vec2> dirs;
        for (const auto& b : branches) {
          dirs.push_back(detail::trace_direction(m, {x, y}, b, 6));
        }
        // the two most similar branches hug the continuing ridge; their
        // mean points along the fork
        double best = -2.0;
        Vec2 sum{1.0, 0.0};
        for (size_t i = 0; i < dirs.size(); ++i) {
          for (size_t j = i + 1; j < dirs.size(); ++j) {
            const double dot = dirs[i].x * dirs[j].x + dirs[i].y * dirs[j].y;
            if (dot > best) {
              best = dot;
              sum = {dirs[i].x + dirs[j].x, dirs[i].y + dirs[j].y};
            }
          }
        }
        mi.angle = wrap_two_pi(std::atan2(sum.y, sum.x));
      }
      raw.push_back(mi);
    }
  }

  // dedup: highest-reliability point wins inside a 6 px radius
  std::sort(raw.begin(), raw.end(), [](const Minutia& a, const Minutia& b) {
    if (a.reliability != b.reliability) return a.reliability > b.reliability;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });
  MinutiaSet kept;
  constexpr double kMinSpacing = 6.0;
  for (const Minutia& c : raw) {
    bool ok = true;
    for (const Minutia& k : kept) {
      const double dx = c.x - k.x, dy = c.y - k.y;
      if (dx * dx + dy * dy < kMinSpacing * kMinSpacing) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(), [](const Minutia& a, const Minutia& b) {
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });
  return kept;
}

/// Full per-image analysis used by the report and the matcher.
struct ImageAnalysis {
  Bitmap foreground;
  OrientationField field;
  RidgeMap skeleton;
  MinutiaSet minutiae;
};

inline ImageAnalysis analyze_image(const GrayImage& img) {
  ImageAnalysis a;
  RidgeMap ridges = enhance_and_binarize(img);
  a.foreground = ridges.mask;
  a.field = estimate_orientation(img);
  a.skeleton = thin(ridges);
  a.minutiae = extract_minutiae(a.skeleton, a.field);
  return a;
}

inline MinutiaSet extract_from_image(const GrayImage& img) {
  return analyze_image(img).minutiae;
}

/// Per-image values of the seven report metrics.
struct ImageMetrics {
  double ridge_ending_count = 0.0;
  double bifurcation_count = 0.0;
  double ridge_reliability = 0.0;
  double bifurcation_reliability = 0.0;
  double bifurcation_percentage = 0.0;  // of all minutiae, in [0, 100]
  double fingerprint_area = 0.0;        // % of the frame
  double quality = 0.0;                 // proxy score, [0, 100]
};

/// Composite quality proxy: orientation coherence, ridge contrast, mean
/// minutiae reliability and covered area, blended to [0, 100]. This is a
/// stand-in indicator, not an NFIQ2 implementation, and is labelled
/// "(proxy)" in every emitted report.
inline ImageMetrics compute_metrics(const GrayImage& img, const ImageAnalysis& a) {
  ImageMetrics m;
  const size_t fg = a.foreground.count();
  m.fingerprint_area = 100.0 * static_cast<double>(fg) / (static_cast<double>(img.width()) * img.height());
  if (fg == 0) return m;

  int endings = 0, bifs = 0;
  double rel_end = 0.0, rel_bif = 0.0, rel_all = 0.0;
  for (const Minutia& mi : a.minutiae) {
    rel_all += mi.reliability;
    if (mi.kind == MinutiaKind::RidgeEnding) {
      ++endings;
      rel_end += mi.reliability;
    } else {
      ++bifs;
      rel_bif += mi.reliability;
    }
  }
  m.ridge_ending_count = endings;
  m.bifurcation_count = bifs;
  m.ridge_reliability = endings > 0 ? rel_end / endings : 0.0;
  m.bifurcation_reliability = bifs > 0 ? rel_bif / bifs : 0.0;
  m.bifurcation_percentage =
      (endings + bifs) > 0 ? 100.0 * bifs / (endings + bifs) : 0.0;

  // coherence over foreground blocks
  double coh = 0.0;
  size_t coh_n = 0;
  const int bs = a.field.block_size();
  for (int by = 0; by < a.field.rows(); ++by) {
    for (int bx = 0; bx < a.field.cols(); ++bx) {
      const int px = bx * bs + bs / 2;
      const int py = by * bs + bs / 2;
      if (!a.foreground.test(px, py)) continue;
      coh += a.field.coherence_at(px, py);
      ++coh_n;
    }
  }
  const double coherence = coh_n > 0 ? coh / coh_n : 0.0;

  // ridge-valley contrast inside the foreground
  double sum = 0.0, sq = 0.0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!a.foreground.at(x, y)) continue;
      const double v = img.at(x, y);
      sum += v;
      sq += v * v;
    }
  }
  const double mean = sum / fg;
  const double stddev = std::sqrt(std::max(0.0, sq / fg - mean * mean));
  const double contrast = std::min(1.0, stddev / 80.0);
  const double rel_mean = a.minutiae.empty() ? 0.0 : rel_all / a.minutiae.size();
  const double area_term = std::min(1.0, (m.fingerprint_area / 100.0) / 0.25);

  m.quality = 100.0 * std::clamp(
      0.45 * coherence + 0.25 * rel_mean + 0.15 * contrast + 0.15 * area_term, 0.0, 1.0);
  return m;
}

inline ImageMetrics analyze_metrics(const GrayImage& img) {
  const ImageAnalysis a = analyze_image(img);
  return compute_metrics(img, a);
}

/// NFIQ2-style composite quality proxy in [0, 100]; 0 for blank images.
inline double quality_score(const GrayImage& img) {
  return analyze_metrics(img).quality;
}

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

struct QualityReport {
  MetricSummary ridge_ending_count;
  MetricSummary bifurcation_count;
  MetricSummary ridge_reliability;
  MetricSummary bifurcation_reliability;
  MetricSummary bifurcation_percentage;
  MetricSummary fingerprint_area;
  MetricSummary quality;
  size_t images = 0;
  size_t skipped = 0;
};

/// Two-pass population mean/std aggregation of per-image metrics.
inline QualityReport summarize_metrics(std::span<const ImageMetrics> metrics) {
  QualityReport r;
  r.images = metrics.size();
  if (metrics.empty()) return r;

  auto summarize = [&](auto getter) {
    MetricSummary s;
    double sum = 0.0;
    for (const ImageMetrics& m : metrics) sum += getter(m);
    s.mean = sum / metrics.size();
    double sq = 0.0;
    for (const ImageMetrics& m : metrics) {
      const double d = getter(m) - s.mean;
      sq += d * d;
    }
    s.stddev = std::sqrt(sq / metrics.size());
    return s;
  };
  r.ridge_ending_count = summarize([](const ImageMetrics& m) { return m.ridge_ending_count; });
  r.bifurcation_count = summarize([](const ImageMetrics& m) { return m.bifurcation_count; });
  r.ridge_reliability = summarize([](const ImageMetrics& m) { return m.ridge_reliability; });
  r.bifurcation_reliability =
      summarize([](const ImageMetrics& m) { return m.bifurcation_reliability; });
  r.bifurcation_percentage =
      summarize([](const ImageMetrics& m) { return m.bifurcation_percentage; });
  r.fingerprint_area = summarize([](const ImageMetrics& m) { return m.fingerprint_area; });
  r.quality = summarize([](const ImageMetrics& m) { return m.quality; });
  return r;
}

/// Report over in-memory images.
inline QualityReport quality_report_from_images(std::span<const GrayImage> images,
                                                int workers = 1) {
  std::vector<ImageMetrics> metrics(images.size());
  parallel_for(images.size(), workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) metrics[i] = analyze_metrics(images[i]);
  });
  return summarize_metrics(metrics);
}

/// Report over a manifest's image files. Unreadable images are skipped
/// with a warning and counted in the report.
inline QualityReport quality_report_from_files(const DatasetManifest& manifest,
                                               const std::filesystem::path& root,
                                               int workers = 1) {
  const size_t n = manifest.records.size();
  std::vector<ImageMetrics> per(n);
  std::vector<uint8_t> ok(n, 0);
  parallel_for(n, workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      try {
        const GrayImage img = read_png_gray8(root / manifest.records[i].path);
        per[i] = analyze_metrics(img);
        ok[i] = 1;
      } catch (const std::exception& e) {
        const std::string msg = "warning: skipping record " + std::to_string(i + 1) + ": " +
                                e.what() + "\n";
        std::cerr << msg;
      }
    }
  });
  std::vector<ImageMetrics> metrics;
  metrics.reserve(n);
  size_t skipped = 0;
  for (size_t i = 0; i < n; ++i) {
    if (ok[i]) {
      metrics.push_back(per[i]);
    } else {
      ++skipped;
    }
  }
  QualityReport r = summarize_metrics(metrics);
  r.skipped = skipped;
  return r;
}

/// CSV emission: the seven report metrics as rows with mean/std columns.
/// The composite quality row is labelled as a proxy.
inline void write_quality_csv(const QualityReport& r, std::ostream& out) {
  out << "# mean/std are population statistics over " << r.images << " images ("
      << r.skipped << " skipped)\n";
  out << "metric,mean,std\n";
  auto row = [&](const char* name, const MetricSummary& s) {
    out << name << ',' << s.mean << ',' << s.stddev << '\n';
  };
  row("ridge_ending_count", r.ridge_ending_count);
  row("bifurcation_count", r.bifurcation_count);
  row("ridge_reliability", r.ridge_reliability);
  row("bifurcation_reliability", r.bifurcation_reliability);
  row("bifurcation_percentage", r.bifurcation_percentage);
  row("fingerprint_area", r.fingerprint_area);
  row("quality_score (proxy)", r.quality);
}

}  // namespace fpsynth
