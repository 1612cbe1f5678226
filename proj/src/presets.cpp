#include "ame/presets.hpp"

#include <cmath>
#include <numbers>

#include "ame/errors.hpp"

namespace ame {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

void require_geometry(bool ok, const std::string& what) {
  if (!ok) throw InvalidGeometry(what);
}

// 45-degree fold that sends light travelling down -z towards -y; normal
// faces the eye and the floor.
Pose fold_mirror_pose(const Vec3& center) {
  return Pose(center, {1, 0, 0}, Vec3{0, 1, 1} / kSqrt2, Vec3{0, -1, 1} / kSqrt2);
}

// TMD plate leaning at 45 degrees: the eye (+z side) is in front, whatever
// lies below it (-y) is behind and is imaged onto the eye axis.
Pose tmd_plate_pose(const Vec3& center) {
  return Pose(center, {1, 0, 0}, Vec3{0, 1, -1} / kSqrt2, Vec3{0, 1, 1} / kSqrt2);
}

// Face-up frame for parts lying below the optical axis; v runs away from
// the eye so that a screen read through a single fold appears upright.
Pose face_up_pose(const Vec3& center) { return Pose(center, {1, 0, 0}, {0, 0, -1}, {0, 1, 0}); }

Screen far_background() {
  const PatternSpec pattern{PatternKind::checker, 400, 400, 40, 0.25};
  return Screen::with_pattern(Pose::at({0, 0, -2000}), {10000, 10000}, pattern);
}

TmdPlate make_plate(const TmdParams& tmd, const Vec3& center) {
  TmdPlate plate;
  plate.pose = tmd_plate_pose(center);
  // The plate leans at 45 degrees, so sqrt(2) of height projects to the
  // same window size vertically as horizontally.
  plate.extent = {tmd.size, tmd.size * kSqrt2};
  plate.pitch = tmd.pitch;
  plate.mirror_ratio = tmd.mirror_ratio;
  plate.weights = tmd.weights;
  plate.polarizer = tmd.polarizer;
  plate.angular_fill = tmd.angular_fill;
  return plate;
}

Scene folded_mirror_scene(double l1, double a, double d, std::optional<double> a_mag) {
  require_geometry(l1 >= 0.0, "screen size must be non-negative");
  require_geometry(a > 0.0 && d > 0.0, "distances must be positive");

  const Vec3 mirror_center{0, 0, -a};
  const Extent mirror_extent{2.0 * (l1 + a + d), kSqrt2 * d};
  std::vector<OpticalElement> elements;
  if (a_mag) {
    ConvexMirror m;
    m.pose = fold_mirror_pose(mirror_center);
    m.magnification = *a_mag;
    m.extent = mirror_extent;
    // Sagittal curvature of a 45-degree mirror is scaled by cos 45.
    m.reference_distance = std::cos(deg_to_rad(45.0)) * a * d / (a + d);
    elements.push_back({"mirror", m});
  } else {
    elements.push_back({"mirror", HalfMirror{fold_mirror_pose(mirror_center), mirror_extent, 0.5}});
  }
  const PatternSpec pattern{PatternKind::checker, 64, 64, 8, 1.0};
  elements.push_back({"screen", Screen::with_pattern(face_up_pose({0, -d, -a}), {l1, l1}, pattern)});

  EyeCamera eye = default_eye();
  eye.focus_distance = a + d;
  return Scene(std::move(elements), eye, far_background());
}

}  // namespace

std::optional<HmdSpec> find_hmd(std::string_view name) {
  if (name == "cardboard") return HmdSpec{"cardboard", 90.0, 1280, 800, 640, 800};
  if (name == "dk2") return HmdSpec{"dk2", 110.0, 1920, 1080, 960, 1080};
  return std::nullopt;
}

std::vector<std::string> hmd_names() { return {"cardboard", "dk2"}; }

EyeCamera default_eye(const Vec3& position) {
  EyeCamera eye;
  eye.pose = Pose::at(position);
  eye.focal_length = 17.0;
  eye.aperture_diameter = 4.0;
  // 120 degrees across 256 px.
  eye.sensor = {256, 256, 2.0 * 17.0 * std::tan(deg_to_rad(60.0)) / 256.0};
  eye.focus_distance = 1e6;
  return eye;
}

Scene half_mirror_preset(double l1, double a, double d) { return folded_mirror_scene(l1, a, d, std::nullopt); }

Scene convex_mirror_preset(double l1, double a, double d, double a_mag) {
  require_geometry(a_mag > 0.0, "magnification must be positive");
  return folded_mirror_scene(l1, a, d, a_mag);
}

Scene tmd_see_through_preset(double l1, double d2, double d4, const TmdParams& tmd) {
  require_geometry(d2 > 0.0 && d4 > 0.0, "distances must be positive");
  require_geometry(l1 > 0.0 && tmd.size > 0.0, "sizes must be positive");
  require_geometry(l1 < 2.0 * d2, "screen would cross the TMD plane");

  std::vector<OpticalElement> elements;
  elements.push_back({"tmd", make_plate(tmd, {0, 0, -d4})});
  const PatternSpec pattern{PatternKind::checker, 64, 64, 8, 1.0};
  elements.push_back({"screen", Screen::with_pattern(face_up_pose({0, -d2, -d4}), {l1, l1}, pattern)});

  EyeCamera eye = default_eye();
  eye.focus_distance = d4 > d2 ? d4 - d2 : 1e6;
  return Scene(std::move(elements), eye, far_background());
}

double eyepiece_focal_length(const HmdSpec& hmd, double screen_width) {
  return 0.5 * screen_width / std::tan(0.5 * deg_to_rad(hmd.fov_deg));
}

Vec3 ame_lens_image_point(double d2, double d4) { return {0, 0, -d4 + d2}; }

Scene ame_preset(const HmdSpec& hmd, const TmdParams& tmd, double d2, double d4, const AmeOptions& options) {
  require_geometry(d2 > 0.0, "d2 must be positive");
  require_geometry(d4 > 0.0, "d4 must be positive");
  require_geometry(hmd.fov_deg > 0.0 && hmd.fov_deg < 180.0, "device FOV must lie in (0, 180)");
  require_geometry(tmd.size > 0.0 && options.screen_width > 0.0, "sizes must be positive");
  const double aperture = options.lens_aperture.value_or(tmd.size);
  require_geometry(aperture > 0.0, "lens aperture must be positive");
  require_geometry(aperture <= tmd.size, "lens aperture exceeds the TMD window");

  const double f = eyepiece_focal_length(hmd, options.screen_width);
  double panel_distance = f;
  if (options.virtual_image_distance) {
    require_geometry(*options.virtual_image_distance > 0.0, "virtual image distance must be positive");
    panel_distance = 1.0 / (1.0 / f + 1.0 / *options.virtual_image_distance);
  }

  const Vec3 lens_center{0, -d2, -d4};
  std::vector<OpticalElement> elements;
  elements.push_back({"tmd", make_plate(tmd, {0, 0, -d4})});
  elements.push_back({"eyepiece", ThinLens{face_up_pose(lens_center), f, aperture}});
  if (aperture < 1.9 * d2) {
    // Housing around the eyepiece, just below the lens plane.
    const double width = std::max(3.0 * options.screen_width, aperture + 2.0 * options.screen_width);
    elements.push_back({"housing", Absorber{face_up_pose(lens_center - Vec3{0, 0.01, 0}), {width, 1.98 * d2}, aperture}});
  }
  const double aspect = hmd.per_eye_width_px > 0 && hmd.per_eye_height_px > 0
                            ? static_cast<double>(hmd.per_eye_height_px) / hmd.per_eye_width_px
                            : 1.0;
  const Extent panel{options.screen_width, options.screen_width * aspect};
  elements.push_back({"panel", Screen::with_pattern(face_up_pose(lens_center - Vec3{0, panel_distance, 0}), panel,
                                                    options.pattern, true, true)});

  EyeCamera eye = default_eye();
  if (options.virtual_image_distance) {
    const double to_image = d4 - d2 - *options.virtual_image_distance;
    eye.focus_distance = to_image > 0.0 ? to_image : 1e6;
  }
  return Scene(std::move(elements), eye, options.with_background ? std::optional<Screen>(far_background()) : std::nullopt);
}

ExperimentSetup experiment_preset(bool with_eyepiece, const TmdParams& tmd) {
  constexpr double kCameraFocal = 100.0;
  constexpr double d2 = 60.0;
  EyeCamera camera;
  camera.pose = Pose::at({0, 0, 0});
  camera.focal_length = kCameraFocal;
  camera.aperture_diameter = kCameraFocal / 2.8;
  camera.sensor = {256, 256, 0.16};
  camera.focus_distance = kCameraFocal;

  const PatternSpec pattern{PatternKind::checker, 64, 64, 8, 1.0};
  const double panel_width = 20.0;

  if (!with_eyepiece) {
    const double d4 = d2 + kCameraFocal;
    std::vector<OpticalElement> elements;
    elements.push_back({"tmd", make_plate(tmd, {0, 0, -d4})});
    elements.push_back({"panel", Screen::with_pattern(face_up_pose({0, -d2, -d4}), {panel_width, panel_width}, pattern)});
    return {Scene(std::move(elements), camera), {0, 0, -kCameraFocal}};
  }

  // Eyepiece with its virtual image 60 mm behind the lens. The TMD turns
  // that virtual image into a real one 60 mm in front of the lens image.
  constexpr double kEyepieceFocal = 50.0;
  constexpr double kVirtualImage = 60.0;
  // Wide enough that the camera field is never vignetted by the lens rim.
  constexpr double kEyepieceAperture = 90.0;
  const double d4 = d2 + kVirtualImage + kCameraFocal;
  const double panel_distance = 1.0 / (1.0 / kEyepieceFocal + 1.0 / kVirtualImage);
  const Vec3 lens_center{0, -d2, -d4};
  std::vector<OpticalElement> elements;
  elements.push_back({"tmd", make_plate(tmd, {0, 0, -d4})});
  elements.push_back({"eyepiece", ThinLens{face_up_pose(lens_center), kEyepieceFocal, kEyepieceAperture}});
  elements.push_back({"housing", Absorber{face_up_pose(lens_center - Vec3{0, 0.01, 0}), {200.0, 1.98 * d2}, kEyepieceAperture}});
  elements.push_back({"panel", Screen::with_pattern(face_up_pose(lens_center - Vec3{0, panel_distance, 0}),
                                                    {panel_width, panel_width}, pattern, true, true)});
  return {Scene(std::move(elements), camera), {0, 0, -kCameraFocal}};
}

std::vector<std::string> preset_names() {
  return {"half_mirror",   "convex_mirror", "tmd_see_through",        "ame_dk2",
          "ame_cardboard", "experiment_no_eyepiece", "experiment_eyepiece"};
}

std::optional<Scene> named_preset(std::string_view name) {
  TmdParams prototype;
  prototype.size = 120.0;
  prototype.pitch = 0.5;
  prototype.polarizer = true;
  if (name == "half_mirror") return half_mirror_preset(40, 20, 20);
  if (name == "convex_mirror") return convex_mirror_preset(40, 20, 20, 1.5);
  if (name == "tmd_see_through") return tmd_see_through_preset(40, 60, 160, prototype);
  if (name == "ame_dk2") return ame_preset(*find_hmd("dk2"), prototype, 40, 40);
  if (name == "ame_cardboard") return ame_preset(*find_hmd("cardboard"), prototype, 40, 40);
  if (name == "experiment_no_eyepiece") return experiment_preset(false, prototype).scene;
  if (name == "experiment_eyepiece") return experiment_preset(true, prototype).scene;
  return std::nullopt;
}

}  // namespace ame
