#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ame/scene.hpp"

namespace ame {

/// Off-the-shelf HMDs: "cardboard" and "dk2".
std::optional<HmdSpec> find_hmd(std::string_view name);
std::vector<std::string> hmd_names();

/// TMD plate parameters without placement.
struct TmdParams {
  double size = 120.0;  // l3, the horizontal window width
  double pitch = 0.0;
  double mirror_ratio = 3.0;
  ModeWeights weights;
  bool polarizer = false;
  bool angular_fill = false;
};

struct AmeOptions {
  double screen_width = 60.0;  // l1 of the HMD panel (per eye)
  /// l2; defaults to the TMD size when unset.
  std::optional<double> lens_aperture;
  /// Distance of the eyepiece's virtual image; unset means the panel sits
  /// at the focal plane (collimated output).
  std::optional<double> virtual_image_distance;
  PatternSpec pattern{PatternKind::quadrants, 64, 64, 8, 1.0};
  bool with_background = true;
};

// Every preset puts the eye at the origin looking down -z with +y up. The
// folded layouts bend the optical path down towards -y at 45 degrees.

/// Eye, 45-degree half mirror at distance a, screen of width l1 a
/// further distance d below the mirror.
Scene half_mirror_preset(double l1, double a, double d);

/// As the half-mirror layout, with a curved mirror of paraxial
/// angular magnification a_mag in place of the half mirror.
Scene convex_mirror_preset(double l1, double a, double d, double a_mag);

/// A bare screen of width l1 a distance d2 below a 45-degree TMD
/// plate that sits d4 in front of the eye. The screen's aerial image floats
/// d2 in front of the plate on the eye axis.
Scene tmd_see_through_preset(double l1, double d2, double d4, const TmdParams& tmd);

/// The HMD (panel plus eyepiece lens) lies face up d2 below the
/// 45-degree TMD plate, which is d4 in front of the eye. The eyepiece focal
/// length is (l1/2) / tan(fov/2). The panel is flipped on both axes.
/// Throws InvalidGeometry for nonpositive distances or when the lens
/// aperture exceeds the TMD window.
Scene ame_preset(const HmdSpec& hmd, const TmdParams& tmd, double d2, double d4, const AmeOptions& options = {});

/// Eyepiece focal length used by ame_preset.
double eyepiece_focal_length(const HmdSpec& hmd, double screen_width);

/// Point where the aerial image of the lens center forms in ame_preset.
Vec3 ame_lens_image_point(double d2, double d4);

/// Desk-scale defocus experiment: a 100 mm camera focused 100 mm ahead,
/// placed so the aerial target is in focus at offset 0. Without the
/// eyepiece the target is the panel's aerial image; with it, the aerial
/// image of the eyepiece's virtual image.
struct ExperimentSetup {
  Scene scene;
  Vec3 target;
};

ExperimentSetup experiment_preset(bool with_eyepiece, const TmdParams& tmd);

/// Camera looking down -z from `position` (used by presets).
EyeCamera default_eye(const Vec3& position = {});

/// Built-in scenes by name, for `presets` dumps and CLI `preset:<name>`.
std::vector<std::string> preset_names();
std::optional<Scene> named_preset(std::string_view name);

}  // namespace ame
