// Multiple-impression simulation: random rigid placement, smooth RBF
// elastic deformation, fingerprint-area masking, and contrast/brightness
// jitter confined to the print. Composing the four steps on a master
// print yields one acquisition-like impression.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "fpsynth/core.hpp"
#include "fpsynth/image.hpp"
#include "fpsynth/rng.hpp"

namespace fpsynth {

struct RbfControl {
  Vec2 point;
  Vec2 weight;  // displacement carried by this control, |weight| <= 8 px
};

struct ImpressionParams {
  double dx = 0.0;          // translation, [-10, 10] px
  double dy = 0.0;          // translation, [-10, 10] px
  double angle_deg = 0.0;   // rotation about center, [-30, 30] degrees
  std::vector<RbfControl> controls;  // 4..32 controls
  double sigma = 48.0;      // RBF width, >= 40 px
  int mask_threshold = 180;
  double alpha = 1.0;       // contrast gain, [0.7, 1.3]
  double beta = 0.0;        // brightness offset, [-30, 30]

  void validate() const {
    auto check = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("impression params: ") + what);
    };
    check(dx >= -10.0 && dx <= 10.0, "dx out of [-10, 10]");
    check(dy >= -10.0 && dy <= 10.0, "dy out of [-10, 10]");
    check(angle_deg >= -30.0 && angle_deg <= 30.0, "angle out of [-30, 30]");
    check(controls.size() >= 4 && controls.size() <= 32, "control count out of [4, 32]");
    for (const RbfControl& c : controls) {
      check(c.weight.norm() <= 8.0 + 1e-9, "control weight exceeds 8 px");
    }
    check(sigma >= 40.0, "sigma below 40 px");
    check(alpha >= 0.7 && alpha <= 1.3, "alpha out of [0.7, 1.3]");
    check(beta >= -30.0 && beta <= 30.0, "beta out of [-30, 30]");
  }
};

/// Gaussian-kernel displacement field evaluated at one point:
/// u(p) = sum_i w_i * exp(-|p - c_i|^2 / (2 sigma^2)).
inline Vec2 rbf_displacement(std::span<const RbfControl> controls, double sigma, Vec2 at) {
  Vec2 u;
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (const RbfControl& c : controls) {
    const double ddx = at.x - c.point.x;
    const double ddy = at.y - c.point.y;
    const double k = std::exp(-(ddx * ddx + ddy * ddy) * inv);
    u.x += c.weight.x * k;
    u.y += c.weight.y * k;
  }
  return u;
}

namespace detail {

// Largest displacement magnitude over the frame, sampled on a coarse
// grid plus the control points themselves. The field varies on the
// sigma scale (>= 40 px), so an 8 px grid tracks the true maximum
// closely.
inline double max_rbf_displacement(std::span<const RbfControl> controls, double sigma,
                                   int size) {
  double best = 0.0;
  for (int y = 0; y < size; y += 8) {
    for (int x = 0; x < size; x += 8) {
      best = std::max(best, rbf_displacement(controls, sigma, {double(x), double(y)}).norm());
    }
  }
  for (const RbfControl& c : controls) {
    best = std::max(best, rbf_displacement(controls, sigma, c.point).norm());
  }
  return best;
}

}  // namespace detail

/// Draws one full impression parameterization. Translation, rotation,
/// contrast and brightness are uniform over their stated ranges; the 16
/// deformation controls sit on a jittered 4x4 grid over the central
/// region, and their weights are rescaled if the combined field would
/// locally exceed ~12 px, keeping the warp gentle and fold-free.
inline ImpressionParams sample_params(RngStream& rng) {
  ImpressionParams p;
  p.dx = rng.uniform(-10.0, 10.0);
  p.dy = rng.uniform(-10.0, 10.0);
  p.angle_deg = rng.uniform(-30.0, 30.0);
  p.alpha = rng.uniform(0.7, 1.3);
  p.beta = rng.uniform(-30.0, 30.0);
  p.sigma = rng.uniform(40.0, 56.0);
  p.mask_threshold = 180;

  constexpr double kLo = 64.0, kHi = 448.0;
  const double step = (kHi - kLo) / 4.0;
  for (int gy = 0; gy < 4; ++gy) {
    for (int gx = 0; gx < 4; ++gx) {
      RbfControl c;
      c.point.x = kLo + (gx + 0.5) * step + rng.uniform(-24.0, 24.0);
      c.point.y = kLo + (gy + 0.5) * step + rng.uniform(-24.0, 24.0);
      const double ang = rng.uniform(0.0, 2.0 * kPi);
      const double mag = rng.uniform(1.0, 7.0);
      c.weight = {mag * std::cos(ang), mag * std::sin(ang)};
      p.controls.push_back(c);
    }
  }
  const double max_disp = detail::max_rbf_displacement(p.controls, p.sigma, kImageSize);
  constexpr double kDisplacementCap = 11.5;
  if (max_disp > kDisplacementCap) {
    const double scale = kDisplacementCap / max_disp;
    for (RbfControl& c : p.controls) c.weight = c.weight * scale;
  }
  p.validate();
  return p;
}

/// Translates by (dx, dy), then rotates about the image center. Bilinear
/// resampling, white fill outside the source frame. Exact pass-through
/// for the identity transform.
inline GrayImage apply_rigid(const GrayImage& img, double dx, double dy, double angle_deg) {
  const double rad = deg_to_rad(angle_deg);
  const double c = std::cos(rad), s = std::sin(rad);
  const double cx = img.width() / 2.0, cy = img.height() / 2.0;
  GrayImage out(img.width(), img.height(), 255);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      // inverse map: undo the rotation, then the translation
      const double rx = x - cx, ry = y - cy;
      const double sx = c * rx + s * ry + cx - dx;
      const double sy = -s * rx + c * ry + cy - dy;
      const double v = img.sample_bilinear(sx, sy, 255);
      out.at(x, y) = static_cast<uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
    }
  }
  return out;
}

/// Backward-warps through the RBF displacement field with bilinear
/// sampling; positions that leave the source read white.
inline GrayImage apply_deformation(const GrayImage& img, const ImpressionParams& params) {
  params.validate();
  GrayImage out(img.width(), img.height(), 255);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Vec2 u = rbf_displacement(params.controls, params.sigma,
                                      {static_cast<double>(x), static_cast<double>(y)});
      const double v = img.sample_bilinear(x - u.x, y - u.y, 255);
      out.at(x, y) = static_cast<uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
    }
  }
  return out;
}

/// Fingerprint-area mask: foreground is every pixel darker than the
/// threshold. The comparison keeps the white background out of the mask.
inline Bitmap fingerprint_mask(const GrayImage& img, int threshold = 180) {
  Bitmap mask(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      mask.at(x, y) = img.at(x, y) < threshold ? 1 : 0;
    }
  }
  return mask;
}

/// out = clamp(alpha * in + beta) inside the mask; pixels outside the
/// mask pass through bit-identical.
inline GrayImage adjust_contrast(const GrayImage& img, const Bitmap& mask, double alpha,
                                 double beta) {
  GrayImage out = img;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!mask.at(x, y)) continue;
      const double v = alpha * img.at(x, y) + beta;
      out.at(x, y) = static_cast<uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
    }
  }
  return out;
}

/// The four-step impression pipeline with explicit parameters:
/// rigid placement -> elastic deformation -> mask -> contrast jitter.
inline GrayImage apply_impression(const GrayImage& master, const ImpressionParams& p) {
  p.validate();
  GrayImage placed = apply_rigid(master, p.dx, p.dy, p.angle_deg);
  GrayImage warped = apply_deformation(placed, p);
  const Bitmap mask = fingerprint_mask(warped, p.mask_threshold);
  return adjust_contrast(warped, mask, p.alpha, p.beta);
}

/// Samples parameters from the stream and runs the pipeline. Output is a
/// pure function of (master, rng).
inline GrayImage generate_impression(const GrayImage& master, RngStream& rng) {
  return apply_impression(master, sample_params(rng));
}

}  // namespace fpsynth
