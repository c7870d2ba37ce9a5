// Shared domain types for the fpsynth toolkit: finger classes, spoof
// materials, and small geometry helpers used across all modules.

#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fpsynth {

/// Side length of every pipeline-facing image, in pixels.
inline constexpr int kImageSize = 512;

/// One of the ten finger identities. Index 1 is Left-Index, counting
/// through the left hand to Left-Thumb (5), then the right hand in the
/// same order up to Right-Thumb (10).
class FingerClass {
public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 10;

  FingerClass() = default;
  explicit FingerClass(int index) : index_(index) {
    if (index < kMin || index > kMax) {
      throw std::out_of_range("finger class index must be in [1,10], got " +
                              std::to_string(index));
    }
  }

  int index() const { return index_; }
  bool is_right_hand() const { return index_ > 5; }
  bool is_thumb() const { return index_ == 5 || index_ == 10; }
  bool is_little() const { return index_ == 4 || index_ == 9; }

  std::string_view name() const {
    static constexpr std::array<std::string_view, 10> kNames = {
        "Left-Index",  "Left-Middle",  "Left-Ring",  "Left-Little",
        "Left-Thumb",  "Right-Index",  "Right-Middle", "Right-Ring",
        "Right-Little", "Right-Thumb"};
    return kNames[static_cast<size_t>(index_ - 1)];
  }

  auto operator<=>(const FingerClass&) const = default;

private:
  int index_ = 1;
};

/// Capture material: Live, or one of the eight presentation-attack
/// materials a dataset can be rendered in.
enum class Material : uint8_t {
  Live,
  EcoFlex,
  PlayDoh,
  WoodGlue,
  Gelatine,
  Latex,
  OOMOO,
  Silicone,
  BodyDouble,
};

inline constexpr std::array<Material, 9> kAllMaterials = {
    Material::Live,     Material::EcoFlex, Material::PlayDoh,
    Material::WoodGlue, Material::Gelatine, Material::Latex,
    Material::OOMOO,    Material::Silicone, Material::BodyDouble};

inline constexpr std::array<Material, 8> kSpoofMaterials = {
    Material::EcoFlex, Material::PlayDoh,  Material::WoodGlue,
    Material::Gelatine, Material::Latex,   Material::OOMOO,
    Material::Silicone, Material::BodyDouble};

inline std::string_view to_string(Material m) {
  switch (m) {
    case Material::Live:       return "Live";
    case Material::EcoFlex:    return "EcoFlex";
    case Material::PlayDoh:    return "PlayDoh";
    case Material::WoodGlue:   return "WoodGlue";
    case Material::Gelatine:   return "Gelatine";
    case Material::Latex:      return "Latex";
    case Material::OOMOO:      return "OOMOO";
    case Material::Silicone:   return "Silicone";
    case Material::BodyDouble: return "BodyDouble";
  }
  throw std::logic_error("unknown material enum value");
}

inline std::optional<Material> material_from_string(std::string_view s) {
  for (Material m : kAllMaterials) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle to [0, pi). Ridge orientations are undirected.
inline double wrap_pi(double a) {
  a = std::fmod(a, kPi);
  if (a < 0.0) a += kPi;
  if (a >= kPi) a = 0.0;  // guards fmod rounding at the boundary
  return a;
}

/// Signed smallest difference a-b between two orientations mod pi,
/// in [-pi/2, pi/2).
inline double orientation_diff(double a, double b) {
  double d = std::fmod(a - b, kPi);
  if (d < -kPi / 2.0) d += kPi;
  if (d >= kPi / 2.0) d -= kPi;
  return d;
}

/// Signed smallest difference a-b between two directed angles mod 2*pi,
/// in [-pi, pi).
inline double angle_diff(double a, double b) {
  double d = std::fmod(a - b, 2.0 * kPi);
  if (d < -kPi) d += 2.0 * kPi;
  if (d >= kPi) d -= 2.0 * kPi;
  return d;
}

/// Wraps a directed angle to [0, 2*pi).
inline double wrap_two_pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a = 0.0;
  return a;
}

}  // namespace fpsynth
