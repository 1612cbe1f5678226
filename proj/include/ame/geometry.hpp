#pragma once

#include <optional>
#include <span>

#include "ame/vec3.hpp"

namespace ame {

/// Minimum accepted hit distance along a ray.
inline constexpr double kHitEpsilon = 1e-9;
/// Distance a ray origin is advanced past an interaction point.
inline constexpr double kSurfaceOffset = 1e-6;
/// |d.n| below which a ray counts as parallel to a plane.
inline constexpr double kParallelEpsilon = 1e-12;

struct Extent {
  double width = 0.0;
  double height = 0.0;
  bool operator==(const Extent&) const = default;
};

struct PlaneHit {
  double t = 0.0;
  Vec3 point;
  double u = 0.0;  // local plate coordinates, centered on the pose origin
  double v = 0.0;
};

/// Specular reflection of `d` about unit normal `n`.
inline Vec3 reflect(const Vec3& d, const Vec3& n) { return d - n * (2.0 * dot(d, n)); }

/// Nearest crossing of the w=0 plane of `pose` inside the centered
/// rectangle `extent`. Pass an infinite extent for an unbounded plane.
std::optional<PlaneHit> intersect_plane(const Ray& ray, const Pose& pose, const Extent& extent);

struct ConvergencePoint {
  Vec3 point;
  double rms_residual = 0.0;
};

/// Least-squares point closest to every line in `rays` (normal equations).
/// Throws DegenerateBundle when the normal matrix has condition number
/// above 1e12, e.g. for a bundle of parallel rays.
ConvergencePoint closest_point_to_rays(std::span<const Ray> rays);

/// Perpendicular distance from `p` to the infinite line carrying `ray`.
double distance_to_line(const Vec3& p, const Ray& ray);

}  // namespace ame
