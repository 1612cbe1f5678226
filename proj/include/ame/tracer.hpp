#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ame/random.hpp"
#include "ame/scene.hpp"

namespace ame {

enum class Interaction {
  none,  // the ray left the scene
  lens,
  half_mirror_reflect,
  half_mirror_transmit,
  mirror_reflect,
  tmd_double,
  tmd_single_u,
  tmd_single_v,
  tmd_pass,
  tmd_absorbed,
  screen,
  absorber,
  eye,
};

const char* to_string(Interaction i);

enum class Terminal { absorbed, escaped, reached_eye, max_bounces };

const char* to_string(Terminal t);
std::optional<Terminal> terminal_from_string(const std::string& s);
std::optional<RayMode> ray_mode_from_string(const std::string& s);

/// One straight leg of a path. `ray` starts the leg; it ends after
/// `length` mm (infinite for an escaping leg) at `end`, where the
/// interaction happens. For a pitched TMD, `end` is the cell center the
/// next leg leaves from.
struct PathSegment {
  Ray ray;
  double length = 0.0;
  Vec3 end;
  std::string element_id;
  Interaction interaction = Interaction::none;
};

struct TracePath {
  std::vector<PathSegment> segments;
  Terminal terminal = Terminal::escaped;
  /// Lower-weight half-mirror branches, each starting at the split point.
  std::vector<TracePath> children;

  const PathSegment& last() const { return segments.back(); }
};

inline constexpr double kPruneWeight = 1e-4;

/// Follows `ray` through the scene. TMD modes are drawn from `rng` keyed
/// by (branch, bounce); the eye is a disk of the camera's aperture.
TracePath trace_ray(const Scene& scene, const Ray& ray, int max_bounces, const RngStream& rng);

/// Cone of emission directions around `axis`.
struct ConeSpec {
  Vec3 axis{0, 0, 1};
  double half_angle_deg = 5.0;
};

/// Direction i of the cone's low-discrepancy sequence; i = 0 is the axis.
Vec3 cone_direction(const ConeSpec& cone, std::uint64_t i);

struct ModeTally {
  std::uint64_t count = 0;
  double weight = 0.0;
};

struct BundleStats {
  double emitted_weight = 0.0;
  std::array<ModeTally, 4> by_mode{};  // indexed by RayMode, final legs only
  std::array<std::uint64_t, 4> by_terminal{};  // indexed by Terminal, all branches

  const ModeTally& mode(RayMode m) const { return by_mode[static_cast<int>(m)]; }
  std::uint64_t terminal(Terminal t) const { return by_terminal[static_cast<int>(t)]; }
};

struct BundleResult {
  std::vector<TracePath> paths;
  std::uint64_t seed = 0;
  BundleStats stats;
};

/// Traces n_rays from `source` over the cone. Ray i uses direction i of
/// the cone sequence and the random stream (seed, i).
BundleResult trace_bundle(const Scene& scene, const Vec3& source, int n_rays, const ConeSpec& cone,
                          std::uint64_t seed, int max_bounces = 16);

/// Final legs of every path and child path matching the filters. Absorbed
/// and bounce-limited paths are excluded unless asked for explicitly.
struct PathFilter {
  std::optional<RayMode> mode;
  std::optional<Terminal> terminal;
};

std::vector<Ray> terminal_rays(const BundleResult& bundle, const PathFilter& filter = {});

struct SpotDiagram {
  std::vector<std::pair<double, double>> points;  // plane-local (u, v), mm
  double rms_radius = 0.0;
  double centroid_u = 0.0;
  double centroid_v = 0.0;
};

/// Crossings of the terminal legs' lines with the w=0 plane of `plane`.
/// Throws EmptySpot if none cross.
SpotDiagram spot_diagram(const BundleResult& bundle, const Pose& plane, const PathFilter& filter = {});

/// Full horizontal field of view, in degrees, over which backward probes
/// from the eye center reach the front face of a screen. Probes are swept
/// about the eye's v axis on both sides; TMDs act in double-reflection
/// mode only and half mirrors are followed on both branches.
double traced_fov_deg(const Scene& scene);

/// True if a backward probe along `direction` from the eye center reaches
/// a screen front face.
bool probe_reaches_screen(const Scene& scene, const Vec3& direction);

}  // namespace ame
