// Class-conditioned procedural master fingerprints: a zero-pole
// orientation field shaped by per-class silhouettes, rendered by
// iterative oriented Gabor filtering of a random seed.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fpsynth/core.hpp"
#include "fpsynth/image.hpp"
#include "fpsynth/orientation.hpp"
#include "fpsynth/rng.hpp"

namespace fpsynth {

/// Egg-profile silhouette: an ellipse whose lower half narrows by
/// `taper`. All units are pixels relative to the image center.
struct SilhouetteParams {
  double half_width = 150.0;
  double half_height = 200.0;
  double center_y_offset = 4.0;
  double taper = 0.12;
};

struct MasterPrintParams {
  std::vector<Vec2> cores;   // up to 2
  std::vector<Vec2> deltas;  // up to 2
  double ridge_period = 9.0;  // pixels per ridge cycle, [7, 11]
  double theta0 = 0.0;        // base orientation, radians
  SilhouetteParams silhouette;

  void validate() const {
    if (cores.size() > 2) throw std::invalid_argument("at most 2 cores");
    if (deltas.size() > 2) throw std::invalid_argument("at most 2 deltas");
    if (ridge_period < 7.0 || ridge_period > 11.0) {
      throw std::invalid_argument("ridge_period must be in [7, 11]");
    }
    const double margin = 20.0;
    if (silhouette.half_width <= 0 || silhouette.half_height <= 0 ||
        silhouette.half_width > kImageSize / 2.0 - margin ||
        silhouette.half_height + std::abs(silhouette.center_y_offset) >
            kImageSize / 2.0 - margin) {
      throw std::invalid_argument("silhouette does not fit inside the frame");
    }
  }
};

/// Per-class silhouette defaults. Thumbs are the widest digits, little
/// fingers the narrowest; left and right hands share geometry.
inline SilhouetteParams default_silhouette(FingerClass finger_class) {
  SilhouetteParams p;
  switch ((finger_class.index() - 1) % 5 + 1) {
    case 1: p.half_width = 150.0; p.half_height = 200.0; break;  // index
    case 2: p.half_width = 156.0; p.half_height = 208.0; break;  // middle
    case 3: p.half_width = 146.0; p.half_height = 202.0; break;  // ring
    case 4: p.half_width = 122.0; p.half_height = 172.0; break;  // little
    case 5: p.half_width = 180.0; p.half_height = 212.0; break;  // thumb
  }
  return p;
}

inline SilhouetteParams jitter_silhouette(SilhouetteParams p, RngStream& rng) {
  p.half_width += rng.uniform(-6.0, 6.0);
  p.half_height += rng.uniform(-6.0, 6.0);
  p.center_y_offset += rng.uniform(-6.0, 6.0);
  p.taper += rng.uniform(-0.03, 0.05);
  return p;
}

inline Bitmap render_silhouette(const SilhouetteParams& sil, int size) {
  Bitmap mask(size, size);
  const double cx = size / 2.0;
  const double cy = size / 2.0 + sil.center_y_offset;
  for (int y = 0; y < size; ++y) {
    const double ny = (y - cy) / sil.half_height;
    if (ny <= -1.0 || ny >= 1.0) continue;
    const double profile = std::sqrt(1.0 - ny * ny);
    const double half_w = sil.half_width * profile * (1.0 - sil.taper * std::max(0.0, ny));
    const int x0 = static_cast<int>(std::ceil(cx - half_w));
    const int x1 = static_cast<int>(std::floor(cx + half_w));
    for (int x = std::max(0, x0); x <= std::min(size - 1, x1); ++x) {
      mask.at(x, y) = 1;
    }
  }
  return mask;
}

/// Per-class silhouette with random jitter. Thumb-class masks are
/// strictly larger than little-finger masks under the defaults. Takes
/// its own copy of the stream: the same stream always yields the same
/// mask.
inline Bitmap shape_mask(FingerClass finger_class, int size, RngStream rng) {
  return render_silhouette(jitter_silhouette(default_silhouette(finger_class), rng), size);
}

/// Samples the full master-print parameterization: silhouette jitter,
/// ridge period, base orientation, and a core/delta layout drawn from
/// loop / whorl / tented-arch priors (thumbs lean whorl).
inline MasterPrintParams sample_master_params(FingerClass finger_class, RngStream& rng) {
  MasterPrintParams p;
  p.silhouette = jitter_silhouette(default_silhouette(finger_class), rng);
  p.ridge_period = rng.uniform(7.0, 11.0);
  p.theta0 = rng.uniform(-0.12, 0.12);

  const double cx = kImageSize / 2.0;
  const double whorl_p = finger_class.is_thumb() ? 0.35 : 0.22;
  const double arch_p = 0.15;
  const double u = rng.next_double();
  if (u < whorl_p) {
    p.cores.push_back({cx + rng.uniform(-28.0, -8.0), 236.0 + rng.uniform(-25.0, -5.0)});
    p.cores.push_back({cx + rng.uniform(8.0, 28.0), 236.0 + rng.uniform(5.0, 25.0)});
    p.deltas.push_back({cx - rng.uniform(70.0, 102.0), 342.0 + rng.uniform(-12.0, 22.0)});
    p.deltas.push_back({cx + rng.uniform(70.0, 102.0), 342.0 + rng.uniform(-12.0, 22.0)});
  } else if (u < whorl_p + arch_p) {
    // tented arch: core with a delta directly beneath
    const Vec2 core{cx + rng.uniform(-18.0, 18.0), 268.0 + rng.uniform(-12.0, 12.0)};
    p.cores.push_back(core);
    p.deltas.push_back({core.x + rng.uniform(-12.0, 12.0), core.y + rng.uniform(55.0, 85.0)});
  } else {
    // loop; delta sits on the ulnar side of the hand
    const double side = finger_class.is_right_hand() ? -1.0 : 1.0;
    p.cores.push_back({cx + rng.uniform(-26.0, 26.0), 230.0 + rng.uniform(-18.0, 18.0)});
    p.deltas.push_back({cx + side * rng.uniform(45.0, 95.0), 352.0 + rng.uniform(-18.0, 18.0)});
  }
  return p;
}

inline OrientationField orientation_field(const MasterPrintParams& params, int size,
                                          int block_size = 1) {
  params.validate();
  return zero_pole_field(params.cores, params.deltas, params.theta0, size, block_size);
}

struct MasterPrint {
  GrayImage image;
  Bitmap mask;
  bool converged = true;
};

namespace detail {

struct TapSet {
  std::vector<int> offsets;  // flat row-major offsets
  std::vector<float> weights;
};

// One smoothing (Gaussian) and one bandpass (even Gabor) tap line per
// quantized orientation. Offsets are rounded to the pixel grid.
inline void build_gabor_taps(int bins, double sigma, double period, int width,
                             std::vector<TapSet>& along, std::vector<TapSet>& across) {
  const int radius = static_cast<int>(std::ceil(2.0 * sigma));
  along.assign(bins, {});
  across.assign(bins, {});
  for (int b = 0; b < bins; ++b) {
    const double theta = (b + 0.5) * kPi / bins;
    const double ux = std::cos(theta), uy = std::sin(theta);
    const double vx = -uy, vy = ux;

    TapSet& a = along[b];
    double norm = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      const double w = std::exp(-0.5 * k * k / (sigma * sigma));
      const int ox = static_cast<int>(std::lround(k * ux));
      const int oy = static_cast<int>(std::lround(k * uy));
      a.offsets.push_back(oy * width + ox);
      a.weights.push_back(static_cast<float>(w));
      norm += w;
    }
    for (float& w : a.weights) w = static_cast<float>(w / norm);

    TapSet& c = across[b];
    std::vector<double> env, wav;
    double env_sum = 0.0, dc = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      const double g = std::exp(-0.5 * k * k / (sigma * sigma));
      const double w = g * std::cos(2.0 * kPi * k / period);
      env.push_back(g);
      wav.push_back(w);
      env_sum += g;
      dc += w;
    }
    // cancel the DC leak, then normalize the response to a matched cosine
    double gain = 0.0;
    for (size_t i = 0; i < wav.size(); ++i) {
      wav[i] -= env[i] * dc / env_sum;
      const int k = static_cast<int>(i) - radius;
      gain += wav[i] * std::cos(2.0 * kPi * k / period);
    }
    for (size_t i = 0; i < wav.size(); ++i) {
      const int k = static_cast<int>(i) - radius;
      const int ox = static_cast<int>(std::lround(k * vx));
      const int oy = static_cast<int>(std::lround(k * vy));
      c.offsets.push_back(oy * width + ox);
      c.weights.push_back(static_cast<float>(wav[i] / gain));
    }
  }
}

inline void oriented_pass(const std::vector<float>& src, std::vector<float>& dst,
                          const std::vector<uint32_t>& masked_px,
                          const std::vector<uint8_t>& bin_of,
                          const std::vector<TapSet>& taps) {
  for (uint32_t i : masked_px) {
    const TapSet& t = taps[bin_of[i]];
    float acc = 0.0f;
    const size_t n = t.offsets.size();
    for (size_t k = 0; k < n; ++k) {
      acc += t.weights[k] * src[i + t.offsets[k]];
    }
    dst[i] = acc;
  }
}

}  // namespace detail

/// Renders a master print: seeds noise inside the silhouette and applies
/// a fixed number of oriented Gabor filtering iterations steered by the
/// zero-pole field, with a rising contrast (binarize-relax) schedule.
/// Ridges come out dark on a white (255) background.
inline MasterPrint synthesize_master_detailed(const MasterPrintParams& params,
                                              FingerClass finger_class, RngStream& rng) {
  (void)finger_class;  // conditioning lives in the params (silhouette, priors)
  params.validate();
  constexpr int kIterations = 15;
  constexpr int kBins = 48;
  const int size = kImageSize;
  const size_t n_px = static_cast<size_t>(size) * size;

  Bitmap mask = render_silhouette(params.silhouette, size);

  // quantized orientation per masked pixel
  std::vector<uint8_t> bin_of(n_px, 0);
  std::vector<uint32_t> masked_px;
  masked_px.reserve(n_px / 2);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      if (!mask.at(x, y)) continue;
      const size_t i = static_cast<size_t>(y) * size + x;
      const double theta =
          zero_pole_angle(params.cores, params.deltas, params.theta0, x, y);
      int b = static_cast<int>(theta / kPi * kBins);
      bin_of[i] = static_cast<uint8_t>(std::clamp(b, 0, kBins - 1));
      masked_px.push_back(static_cast<uint32_t>(i));
    }
  }

  const double sigma = params.ridge_period * 0.5;
  std::vector<detail::TapSet> along, across;
  detail::build_gabor_taps(kBins, sigma, params.ridge_period, size, along, across);

  // Masked pixels stay well clear of the border (validate() enforces the
  // margin), so taps never leave the raster; off-mask reads are 0.
  std::vector<float> f(n_px, 0.0f), g(n_px, 0.0f), h(n_px, 0.0f);
  RngStream seed_rng = rng.fork(0x5EED);
  for (uint32_t i : masked_px) f[i] = static_cast<float>(seed_rng.uniform(-1.0, 1.0));

  double last_delta = 0.0;
  for (int it = 0; it < kIterations; ++it) {
    detail::oriented_pass(f, g, masked_px, bin_of, along);
    detail::oriented_pass(g, h, masked_px, bin_of, across);

    double sq = 0.0;
    for (uint32_t i : masked_px) sq += static_cast<double>(h[i]) * h[i];
    const double rms = std::sqrt(sq / std::max<size_t>(masked_px.size(), 1)) + 1e-9;

    const double gain = 1.0 + 0.35 * it;
    double delta = 0.0;
    for (uint32_t i : masked_px) {
      const float v = std::tanh(static_cast<float>(gain / rms) * h[i]);
      delta += std::abs(v - f[i]);
      f[i] = v;
    }
    last_delta = delta / std::max<size_t>(masked_px.size(), 1);
  }
  const bool converged = last_delta <= 0.08;

  // edge attenuation, then a light 3x3 binomial blur to soften aliasing
  const std::vector<float> dist = distance_to_background(mask);
  for (uint32_t i : masked_px) {
    const float atten = 0.55f + 0.45f * std::min(1.0f, dist[i] / 20.0f);
    f[i] *= atten;
  }
  GrayImage img(size, size, 255);
  for (uint32_t i : masked_px) {
    const int x = static_cast<int>(i % size);
    const int y = static_cast<int>(i / size);
    float acc = 0.0f;
    float wsum = 0.0f;
    static constexpr float kKernel[3] = {1.0f, 2.0f, 1.0f};
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (!mask.test(x + dx, y + dy)) continue;
        const float w = kKernel[dx + 1] * kKernel[dy + 1];
        acc += w * f[i + dy * size + dx];
        wsum += w;
      }
    }
    const float v = wsum > 0.0f ? acc / wsum : 0.0f;
    const double intensity = 127.5 * (1.0 + v);
    img.pixels()[i] = static_cast<uint8_t>(std::clamp<long>(std::lround(intensity), 0, 255));
  }
  return MasterPrint{std::move(img), std::move(mask), converged};
}

inline GrayImage synthesize_master(const MasterPrintParams& params,
                                   FingerClass finger_class, RngStream& rng) {
  return synthesize_master_detailed(params, finger_class, rng).image;
}

}  // namespace fpsynth
