#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "ame/geometry.hpp"
#include "ame/image.hpp"
#include "ame/vec3.hpp"

namespace ame {

/// Ideal aberration-free lens with a circular aperture in its w=0 plane.
struct ThinLens {
  Pose pose;
  double focal_length = 0.0;
  double aperture_diameter = 0.0;
};

struct HalfMirror {
  Pose pose;
  Extent extent;
  double reflectance = 0.5;
};

/// Spherical cap whose radius is picked so that a viewer at
/// `reference_distance` sees a paraxial angular magnification of
/// `magnification`. Light is expected on the +w side. magnification > 1
/// places the sphere center on the +w side; 1 is a flat mirror.
struct ConvexMirror {
  Pose pose;
  double magnification = 1.0;
  Extent extent;
  double reference_distance = 0.0;

  /// Signed radius 2 d m / (m - 1); infinite for m == 1.
  double radius() const;
  bool is_flat() const;
};

/// Fractions of light leaving a TMD cell in each mode; the remainder up to
/// 1 is absorbed.
struct ModeWeights {
  double p_double = 0.6;
  double p_single = 0.3;
  double p_pass = 0.1;
  bool operator==(const ModeWeights&) const = default;
};

/// Transmissive mirror device: a plate of micro dihedral corner reflectors.
/// The plate-local u and v axes run along the two mirror families.
struct TmdPlate {
  Pose pose;
  Extent extent;
  double pitch = 0.0;  // 0 is an ideal continuous plate
  double mirror_ratio = 3.0;
  ModeWeights weights;
  bool polarizer = false;
  bool angular_fill = false;
};

enum class PatternKind { uniform, checker, quadrants };

const char* to_string(PatternKind k);
std::optional<PatternKind> pattern_from_string(const std::string& s);

/// Procedural source image for a screen.
struct PatternSpec {
  PatternKind kind = PatternKind::checker;
  int width_px = 64;
  int height_px = 64;
  int cells = 8;
  double radiance = 1.0;
  bool operator==(const PatternSpec&) const = default;
};

Image make_pattern(const PatternSpec& spec);

/// Lambertian emitter on its +w face. Screen coordinates (u, v) run from
/// the (-w/2, -h/2) corner, so u in [0, width] and v in [0, height].
struct Screen {
  Pose pose;
  Extent extent;
  PatternSpec pattern;
  Image image;
  bool flip_u = false;
  bool flip_v = false;

  static Screen with_pattern(const Pose& pose, const Extent& extent, const PatternSpec& pattern,
                             bool flip_u = false, bool flip_v = false);
};

/// Opaque plate, optionally with a centered circular opening.
struct Absorber {
  Pose pose;
  Extent extent;
  double hole_diameter = 0.0;
};

using ElementBody = std::variant<ThinLens, HalfMirror, ConvexMirror, TmdPlate, Screen, Absorber>;

struct OpticalElement {
  std::string id;
  ElementBody body;

  const Pose& pose() const;
  const char* kind() const;
};

struct SurfaceHit {
  double t = 0.0;
  Vec3 point;
  double u = 0.0;  // plate-local, centered
  double v = 0.0;
  Vec3 normal;  // surface normal at the hit (unit)
};

/// Nearest valid hit of `ray` on the element's surface.
std::optional<SurfaceHit> intersect(const OpticalElement& element, const Ray& ray);
std::optional<SurfaceHit> intersect(const ThinLens& lens, const Ray& ray);
std::optional<SurfaceHit> intersect(const ConvexMirror& mirror, const Ray& ray);

/// Ideal thin-lens refraction: transverse slope u' = u - h/f.
Ray thin_lens_transform(const Ray& ray, const ThinLens& lens);
Ray thin_lens_transform_at(const Ray& ray, const ThinLens& lens, const SurfaceHit& hit);

enum class TmdMode { double_reflect, single_reflect_u, single_reflect_v, pass_through, absorbed };

const char* to_string(TmdMode m);

/// Mode probabilities at a given plate-local incidence direction after the
/// polarizer (which zeroes the single-reflection share) and the optional
/// angular fill heuristic.
ModeWeights effective_mode_weights(const TmdPlate& plate, const Vec3& incidence_local);

TmdMode classify_tmd_mode(const Vec3& incidence_local, const TmdPlate& plate, double draw);

/// Center of the pitch cell containing plate-local (u, v).
std::pair<double, double> quantize_to_cell(double u, double v, double pitch);

Ray tmd_transform(const Ray& ray, const TmdPlate& plate, TmdMode mode);
Ray tmd_transform_at(const Ray& ray, const TmdPlate& plate, const SurfaceHit& hit, TmdMode mode);

struct MirrorSplit {
  Ray reflected;
  Ray transmitted;
};

MirrorSplit half_mirror_interact(const Ray& ray, const HalfMirror& mirror);
MirrorSplit half_mirror_interact_at(const Ray& ray, const HalfMirror& mirror, const SurfaceHit& hit);

Ray convex_mirror_transform(const Ray& ray, const ConvexMirror& mirror);
Ray convex_mirror_transform_at(const Ray& ray, const SurfaceHit& hit);

/// Bilinear radiance at screen coordinates (u, v) after applying flip_u/v.
/// Throws OutOfBounds outside [0, width] x [0, height].
Rgb screen_emit(const Screen& screen, double u, double v, const Vec3& toward);

}  // namespace ame
