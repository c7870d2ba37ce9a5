// Raster value types: 8-bit grayscale images, binary bitmaps and float
// working buffers, plus the small morphology helpers the pipeline needs.

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpsynth/core.hpp"

namespace fpsynth {

/// 8-bit single-channel raster, row-major. The pipeline convention is
/// white (255) background with dark ridges.
class GrayImage {
public:
  GrayImage() = default;
  GrayImage(int width, int height, uint8_t fill = 255)
      : width_(width), height_(height),
        pixels_(static_cast<size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0) {
      throw std::invalid_argument("image dimensions must be positive");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }
  size_t size() const { return pixels_.size(); }

  uint8_t at(int x, int y) const { return pixels_[idx(x, y)]; }
  uint8_t& at(int x, int y) { return pixels_[idx(x, y)]; }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  const std::vector<uint8_t>& pixels() const { return pixels_; }
  std::vector<uint8_t>& pixels() { return pixels_; }

  /// Bilinear sample at (x, y); positions outside the raster read as
  /// `outside`. Exact at integer coordinates.
  double sample_bilinear(double x, double y, uint8_t outside = 255) const {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    auto fetch = [&](int px, int py) -> double {
      return in_bounds(px, py) ? pixels_[idx(px, py)] : outside;
    };
    const double top = fetch(x0, y0) * (1.0 - fx) + fetch(x0 + 1, y0) * fx;
    const double bot = fetch(x0, y0 + 1) * (1.0 - fx) + fetch(x0 + 1, y0 + 1) * fx;
    return top * (1.0 - fy) + bot * fy;
  }

  bool operator==(const GrayImage&) const = default;

private:
  size_t idx(int x, int y) const {
    return static_cast<size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> pixels_;
};

/// Binary raster (0 = background, 1 = foreground).
class Bitmap {
public:
  Bitmap() = default;
  Bitmap(int width, int height, uint8_t fill = 0)
      : width_(width), height_(height),
        bits_(static_cast<size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }

  uint8_t at(int x, int y) const { return bits_[idx(x, y)]; }
  uint8_t& at(int x, int y) { return bits_[idx(x, y)]; }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  /// Out-of-bounds reads as background.
  bool test(int x, int y) const { return in_bounds(x, y) && bits_[idx(x, y)] != 0; }

  size_t count() const {
    size_t n = 0;
    for (uint8_t b : bits_) n += (b != 0);
    return n;
  }

  const std::vector<uint8_t>& bits() const { return bits_; }
  std::vector<uint8_t>& bits() { return bits_; }

  bool operator==(const Bitmap&) const = default;

private:
  size_t idx(int x, int y) const {
    return static_cast<size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> bits_;
};

/// Float working raster used by the synthesis and enhancement passes.
struct FloatImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  FloatImage() = default;
  FloatImage(int w, int h, float fill = 0.0f)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  float at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  float& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
};

/// Chamfer 3-4 distance (in pixels, approximate euclidean) from each
/// foreground pixel to the nearest background pixel. Background pixels
/// get 0. The raster border counts as background.
inline std::vector<float> distance_to_background(const Bitmap& mask) {
  const int w = mask.width();
  const int h = mask.height();
  const float kBig = std::numeric_limits<float>::max() / 4.0f;
  std::vector<float> d(static_cast<size_t>(w) * h, 0.0f);
  auto at = [&](int x, int y) -> float& { return d[static_cast<size_t>(y) * w + x]; };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      at(x, y) = mask.at(x, y) ? kBig : 0.0f;
    }
  }
  auto relax = [&](int x, int y, int nx, int ny, float cost) {
    const float cand = (nx >= 0 && nx < w && ny >= 0 && ny < h ? at(nx, ny) : 0.0f) + cost;
    if (cand < at(x, y)) at(x, y) = cand;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (at(x, y) == 0.0f) continue;
      relax(x, y, x - 1, y, 3.0f);
      relax(x, y, x, y - 1, 3.0f);
      relax(x, y, x - 1, y - 1, 4.0f);
      relax(x, y, x + 1, y - 1, 4.0f);
    }
  }
  for (int y = h - 1; y >= 0; --y) {
    for (int x = w - 1; x >= 0; --x) {
      if (at(x, y) == 0.0f) continue;
      relax(x, y, x + 1, y, 3.0f);
      relax(x, y, x, y + 1, 3.0f);
      relax(x, y, x + 1, y + 1, 4.0f);
      relax(x, y, x - 1, y + 1, 4.0f);
    }
  }
  for (float& v : d) v /= 3.0f;
  return d;
}

/// Keeps foreground pixels farther than `radius` from the background.
inline Bitmap erode(const Bitmap& mask, double radius) {
  const std::vector<float> dist = distance_to_background(mask);
  Bitmap out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      out.at(x, y) = dist[static_cast<size_t>(y) * mask.width() + x] > radius ? 1 : 0;
    }
  }
  return out;
}

/// Size of the largest 4-connected foreground component.
inline size_t largest_component_size(const Bitmap& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<uint8_t> seen(static_cast<size_t>(w) * h, 0);
  std::vector<std::pair<int, int>> stack;
  size_t best = 0;
  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      if (!mask.at(sx, sy) || seen[static_cast<size_t>(sy) * w + sx]) continue;
      size_t sz = 0;
      stack.push_back({sx, sy});
      seen[static_cast<size_t>(sy) * w + sx] = 1;
      while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        ++sz;
        constexpr int dx[4] = {1, -1, 0, 0};
        constexpr int dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = x + dx[k];
          const int ny = y + dy[k];
          if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
          if (!mask.at(nx, ny) || seen[static_cast<size_t>(ny) * w + nx]) continue;
          seen[static_cast<size_t>(ny) * w + nx] = 1;
          stack.push_back({nx, ny});
        }
      }
      best = std::max(best, sz);
    }
  }
  return best;
}

}  // namespace fpsynth
