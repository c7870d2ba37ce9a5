// Ridge orientation fields. Values are undirected angles in [0, pi),
// stored on a block grid; interpolation works in the doubled-angle
// domain so the mod-pi wraparound never tears the field.

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "fpsynth/core.hpp"

namespace fpsynth {

class OrientationField {
public:
  OrientationField() = default;
  OrientationField(int cols, int rows, int block_size)
      : cols_(cols), rows_(rows), block_size_(block_size),
        theta_(static_cast<size_t>(cols) * rows, 0.0f) {}

  int cols() const { return cols_; }
  int rows() const { return rows_; }
  int block_size() const { return block_size_; }

  float at_block(int bx, int by) const { return theta_[idx(bx, by)]; }
  float& at_block(int bx, int by) { return theta_[idx(bx, by)]; }

  /// Orientation at a pixel position, bilinear in the doubled-angle
  /// domain. Returns a value in [0, pi).
  double angle_at(double x, double y) const {
    double c = 0.0, s = 0.0;
    doubled_vector_at(x, y, c, s);
    if (c == 0.0 && s == 0.0) return 0.0;
    return wrap_pi(0.5 * std::atan2(s, c));
  }

  /// Local consistency of the orientation grid around a pixel position:
  /// resultant length of the doubled-angle unit vectors over the 3x3
  /// block neighbourhood. 1 means perfectly coherent, 0 fully isotropic.
  double coherence_at(double x, double y) const {
    const int bx = static_cast<int>(x) / block_size_;
    const int by = static_cast<int>(y) / block_size_;
    double c = 0.0, s = 0.0;
    int n = 0;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = bx + dx;
        const int ny = by + dy;
        if (nx < 0 || nx >= cols_ || ny < 0 || ny >= rows_) continue;
        const double t = 2.0 * theta_[idx(nx, ny)];
        c += std::cos(t);
        s += std::sin(t);
        ++n;
      }
    }
    if (n == 0) return 0.0;
    return std::sqrt(c * c + s * s) / n;
  }

private:
  void doubled_vector_at(double x, double y, double& c, double& s) const {
    // Block centers sit at (b + 0.5) * block_size.
    const double gx = x / block_size_ - 0.5;
    const double gy = y / block_size_ - 0.5;
    const int x0 = static_cast<int>(std::floor(gx));
    const int y0 = static_cast<int>(std::floor(gy));
    const double fx = gx - x0;
    const double fy = gy - y0;
    c = 0.0;
    s = 0.0;
    for (int dy = 0; dy <= 1; ++dy) {
      for (int dx = 0; dx <= 1; ++dx) {
        int bx = std::clamp(x0 + dx, 0, cols_ - 1);
        int by = std::clamp(y0 + dy, 0, rows_ - 1);
        const double wgt = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
        const double t = 2.0 * theta_[idx(bx, by)];
        c += wgt * std::cos(t);
        s += wgt * std::sin(t);
      }
    }
  }

  size_t idx(int bx, int by) const {
    return static_cast<size_t>(by) * cols_ + bx;
  }

  int cols_ = 0;
  int rows_ = 0;
  int block_size_ = 1;
  std::vector<float> theta_;
};

/// Zero-pole orientation model: each core contributes +1/2 winding, each
/// delta -1/2, on top of a constant base orientation. If a singularity
/// falls exactly on the sample point the evaluation shifts by half a
/// pixel, which keeps the result finite and deterministic.
inline double zero_pole_angle(std::span<const Vec2> cores, std::span<const Vec2> deltas,
                              double theta0, double x, double y) {
  double theta = theta0;
  auto term = [&](const Vec2& p) -> double {
    double ddx = x - p.x;
    double ddy = y - p.y;
    if (ddx == 0.0 && ddy == 0.0) {
      ddx = 0.5;
      ddy = 0.5;
    }
    return std::atan2(ddy, ddx);
  };
  for (const Vec2& c : cores) theta += 0.5 * term(c);
  for (const Vec2& d : deltas) theta -= 0.5 * term(d);
  return wrap_pi(theta);
}

inline OrientationField zero_pole_field(std::span<const Vec2> cores,
                                        std::span<const Vec2> deltas, double theta0,
                                        int size, int block_size = 1) {
  const int cols = (size + block_size - 1) / block_size;
  const int rows = cols;
  OrientationField field(cols, rows, block_size);
  for (int by = 0; by < rows; ++by) {
    for (int bx = 0; bx < cols; ++bx) {
      const double x = (bx + 0.5) * block_size;
      const double y = (by + 0.5) * block_size;
      field.at_block(bx, by) =
          static_cast<float>(zero_pole_angle(cores, deltas, theta0, x, y));
    }
  }
  return field;
}

}  // namespace fpsynth
