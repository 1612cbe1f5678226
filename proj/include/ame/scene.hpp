#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ame/elements.hpp"

namespace ame {

struct SensorSpec {
  int width_px = 256;
  int height_px = 256;
  double pixel_pitch = 0.1;  // mm
  bool operator==(const SensorSpec&) const = default;
};

/// Thin-lens camera looking along -w with u to the right and v up. Pixel
/// directions map through `focal_length`; the lens focuses on the plane
/// `focus_distance` in front of it.
struct EyeCamera {
  Pose pose;
  double focal_length = 17.0;
  double aperture_diameter = 4.0;
  SensorSpec sensor;
  double focus_distance = 1e6;

  Vec3 forward() const { return -pose.w(); }
};

struct HmdSpec {
  std::string name;
  double fov_deg = 90.0;
  int width_px = 0;
  int height_px = 0;
  int per_eye_width_px = 0;
  int per_eye_height_px = 0;
};

/// Validated, immutable optical layout.
class Scene {
 public:
  /// Throws ValidationError on duplicate ids, non-orthonormal poses,
  /// negative dimensions or out-of-range element parameters.
  Scene(std::vector<OpticalElement> elements, EyeCamera eye, std::optional<Screen> background = std::nullopt);

  const std::vector<OpticalElement>& elements() const { return elements_; }
  const EyeCamera& eye() const { return eye_; }
  const std::optional<Screen>& background() const { return background_; }

  const OpticalElement* find(std::string_view id) const;

  Scene with_eye(const EyeCamera& eye) const;
  Scene with_element(const OpticalElement& replacement) const;

 private:
  std::vector<OpticalElement> elements_;
  EyeCamera eye_;
  std::optional<Screen> background_;
};

/// Parses the block-structured `.scene` text format:
///
///   eye { position = 0,0,0  ... }
///   background { ... }
///   element tmd plate { pitch = 0.5 ... }
///
/// One `key = value` pair per line; vectors are comma separated without
/// spaces; `#` starts a comment. Lengths in mm.
Scene parse_scene(std::string_view text);

/// Inverse of parse_scene; keys are emitted in alphabetical order with
/// round-trip precision.
std::string serialize_scene(const Scene& scene);

Scene load_scene(const std::string& path);

}  // namespace ame
