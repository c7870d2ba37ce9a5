// Material-conditioned spoof appearance: each of the eight presentation
// attack materials gets a fixed texture recipe (blur, tone curve, noise,
// ridge dropout, tint) applied inside the fingerprint mask. Also the
// exact arithmetic of the CycleGAN training objective and the live/spoof
// dataset balance check.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "fpsynth/core.hpp"
#include "fpsynth/image.hpp"
#include "fpsynth/impression.hpp"
#include "fpsynth/manifest.hpp"
#include "fpsynth/rng.hpp"

namespace fpsynth {

struct SpoofRecipe {
  Material material = Material::EcoFlex;
  double blur_sigma = 0.0;    // px
  double noise_std = 0.0;     // intensity levels
  double tone_gamma = 1.0;    // applied to normalized intensity
  double dropout_rate = 0.0;  // fraction of ridge pixels erased, [0, 0.3]
  double global_tint = 0.0;   // intensity offset

  void validate() const {
    auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!finite_nonneg(blur_sigma) || !finite_nonneg(noise_std) ||
        !finite_nonneg(tone_gamma) || !std::isfinite(global_tint)) {
      throw std::invalid_argument("spoof recipe: parameters must be finite and non-negative");
    }
    if (dropout_rate < 0.0 || dropout_rate > 0.3) {
      throw std::invalid_argument("spoof recipe: dropout_rate out of [0, 0.3]");
    }
  }
};

/// Stated per-material defaults, chosen for visual plausibility: casting
/// materials blur and soften, Play-Doh crumbles (heavy dropout, flat
/// tone), gelatine is noisy, latex is crisp but shiny.
inline SpoofRecipe default_recipe(Material m) {
  SpoofRecipe r;
  r.material = m;
  switch (m) {
    case Material::EcoFlex:    r = {m, 1.0, 6.0, 1.15, 0.02, 10.0}; break;
    case Material::PlayDoh:    r = {m, 1.4, 4.0, 0.80, 0.12, -5.0}; break;
    case Material::WoodGlue:   r = {m, 0.8, 8.0, 1.05, 0.04, 6.0}; break;
    case Material::Gelatine:   r = {m, 1.8, 10.0, 1.00, 0.03, 0.0}; break;
    case Material::Latex:      r = {m, 0.6, 5.0, 1.25, 0.05, -8.0}; break;
    case Material::OOMOO:      r = {m, 1.2, 7.0, 0.90, 0.08, 4.0}; break;
    case Material::Silicone:   r = {m, 1.0, 9.0, 1.10, 0.06, 12.0}; break;
    case Material::BodyDouble: r = {m, 0.9, 6.0, 0.95, 0.07, -4.0}; break;
    case Material::Live:
      throw std::invalid_argument("no spoof recipe for Live");
  }
  return r;
}

/// Applies a recipe inside the fingerprint mask; every pixel outside the
/// mask is bit-identical to the input. An all-neutral recipe (blur 0,
/// noise 0, gamma 1, dropout 0, tint 0) returns the input unchanged.
inline GrayImage apply_recipe(const GrayImage& img, const SpoofRecipe& recipe,
                              RngStream& rng) {
  recipe.validate();
  const Bitmap mask = fingerprint_mask(img, 180);
  const int w = img.width(), h = img.height();

  const bool any_stage = recipe.blur_sigma > 0.0 || recipe.noise_std > 0.0 ||
                         recipe.tone_gamma != 1.0 || recipe.dropout_rate > 0.0 ||
                         recipe.global_tint != 0.0;
  if (!any_stage) return img;

  std::vector<double> work(static_cast<size_t>(w) * h);
  for (size_t i = 0; i < work.size(); ++i) work[i] = img.pixels()[i];

  // masked pixels in row-major order; all randomness indexes into this
  std::vector<uint32_t> masked;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.at(x, y)) masked.push_back(static_cast<uint32_t>(y) * w + x);
    }
  }
  if (masked.empty()) return img;

  if (recipe.blur_sigma > 0.0) {
    const int radius = std::max(1, static_cast<int>(std::ceil(2.0 * recipe.blur_sigma)));
    std::vector<double> k(2 * radius + 1);
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
      k[i + radius] = std::exp(-0.5 * i * i / (recipe.blur_sigma * recipe.blur_sigma));
      ksum += k[i + radius];
    }
    for (double& v : k) v /= ksum;
    // separable blur evaluated at masked pixels only; reads may leave
    // the mask (pulling in valley white), writes never do
    std::vector<double> tmp = work;
    for (uint32_t i : masked) {
      const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
      double acc = 0.0;
      for (int o = -radius; o <= radius; ++o) {
        const int nx = std::clamp(x + o, 0, w - 1);
        acc += k[o + radius] * work[static_cast<size_t>(y) * w + nx];
      }
      tmp[i] = acc;
    }
    for (uint32_t i : masked) {
      const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
      double acc = 0.0;
      for (int o = -radius; o <= radius; ++o) {
        const int ny = std::clamp(y + o, 0, h - 1);
        acc += k[o + radius] * tmp[static_cast<size_t>(ny) * w + x];
      }
      work[i] = acc;
    }
  }

  if (recipe.tone_gamma != 1.0) {
    for (uint32_t i : masked) {
      const double t = std::clamp(work[i] / 255.0, 0.0, 1.0);
      work[i] = 255.0 * std::pow(t, recipe.tone_gamma);
    }
  }

  if (recipe.noise_std > 0.0) {
    RngStream noise = rng.fork(0x4015E);
    for (uint32_t i : masked) {
      work[i] += noise.normal(0.0, recipe.noise_std);
    }
  }

  if (recipe.dropout_rate > 0.0) {
    RngStream drop = rng.fork(0xD409);
    const size_t target = static_cast<size_t>(recipe.dropout_rate * masked.size());
    size_t erased = 0;
    size_t guard = 0;
    while (erased < target && guard < masked.size() * 4) {
      ++guard;
      const uint32_t center = masked[static_cast<size_t>(
          drop.uniform_int(0, static_cast<int64_t>(masked.size()) - 1))];
      const int cx2 = static_cast<int>(center % w), cy2 = static_cast<int>(center / w);
      const int radius = static_cast<int>(drop.uniform_int(1, 3));
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if (dx * dx + dy * dy > radius * radius) continue;
          const int nx = cx2 + dx, ny = cy2 + dy;
          if (!mask.test(nx, ny)) continue;
          double& v = work[static_cast<size_t>(ny) * w + nx];
          if (v < 200.0) {
            v = 225.0 + drop.uniform(0.0, 20.0);
            ++erased;
          }
        }
      }
    }
  }

  if (recipe.global_tint != 0.0) {
    for (uint32_t i : masked) work[i] += recipe.global_tint;
  }

  GrayImage out = img;
  for (uint32_t i : masked) {
    out.pixels()[i] = static_cast<uint8_t>(std::clamp<long>(std::lround(work[i]), 0, 255));
  }
  return out;
}

/// Material-specific spoof transform. Live is not a spoof material and
/// is rejected.
inline GrayImage apply_spoof(const GrayImage& img, Material material, RngStream& rng) {
  if (material == Material::Live) {
    throw std::invalid_argument("apply_spoof: material must not be Live");
  }
  return apply_recipe(img, default_recipe(material), rng);
}

/// Components of the CycleGAN training objective: two adversarial
/// terms, the cycle-consistency term, and the identity term with their
/// weights (cycle 10.0, identity 0.5 by default).
struct CycleGanObjective {
  double l_gan_ab = 0.0;
  double l_gan_ba = 0.0;
  double l_cyc = 0.0;
  double l_id = 0.0;
  double lambda_cyc = 10.0;
  double lambda_id = 0.5;
};

/// total = L_GAN(A->B) + L_GAN(B->A) + lambda*L_cyc + lambda_id*L_id.
/// Negative components or weights are invalid.
inline double cyclegan_objective(const CycleGanObjective& o) {
  if (o.l_gan_ab < 0.0 || o.l_gan_ba < 0.0 || o.l_cyc < 0.0 || o.l_id < 0.0 ||
      o.lambda_cyc < 0.0 || o.lambda_id < 0.0) {
    throw std::invalid_argument("cyclegan objective: components and weights must be >= 0");
  }
  return o.l_gan_ab + o.l_gan_ba + o.lambda_cyc * o.l_cyc + o.lambda_id * o.l_id;
}

struct MaterialBalance {
  Material material = Material::EcoFlex;
  uint64_t live = 0;
  uint64_t spoof = 0;
  bool balanced = false;
  int64_t deficit = 0;  // live - spoof
};

struct BalanceReport {
  uint64_t live_total = 0;
  std::vector<MaterialBalance> materials;  // spoof materials present in the manifest
  bool all_balanced = true;
};

/// Per-material live vs spoof record counts with a balanced/unbalanced
/// verdict against the manifest's Live records.
inline BalanceReport validate_balanced(const DatasetManifest& manifest) {
  manifest.validate();
  BalanceReport report;
  std::map<Material, uint64_t> counts;
  for (const ManifestRecord& r : manifest.records) counts[r.material] += 1;
  report.live_total = counts.count(Material::Live) ? counts[Material::Live] : 0;
  for (Material m : kSpoofMaterials) {
    if (!counts.count(m)) continue;
    MaterialBalance b;
    b.material = m;
    b.live = report.live_total;
    b.spoof = counts[m];
    b.deficit = static_cast<int64_t>(b.live) - static_cast<int64_t>(b.spoof);
    b.balanced = b.deficit == 0;
    report.all_balanced = report.all_balanced && b.balanced;
    report.materials.push_back(b);
  }
  return report;
}

}  // namespace fpsynth
