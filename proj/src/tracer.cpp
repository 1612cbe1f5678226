#include "ame/tracer.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ame/errors.hpp"
#include "ame/parallel.hpp"

namespace ame {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct NearestHit {
  const OpticalElement* element = nullptr;  // null with eye == true means the eye
  bool eye = false;
  SurfaceHit hit;
};

std::optional<SurfaceHit> intersect_eye(const EyeCamera& eye, const Ray& ray) {
  const auto h = intersect_plane(ray, eye.pose, {kInf, kInf});
  if (!h) return std::nullopt;
  const double r = 0.5 * eye.aperture_diameter;
  if (h->u * h->u + h->v * h->v > r * r) return std::nullopt;
  return SurfaceHit{h->t, h->point, h->u, h->v, eye.pose.w()};
}

std::optional<NearestHit> nearest(const Scene& scene, const Ray& ray, bool include_eye) {
  std::optional<NearestHit> best;
  for (const auto& e : scene.elements()) {
    const auto h = intersect(e, ray);
    if (h && (!best || h->t < best->hit.t)) best = NearestHit{&e, false, *h};
  }
  if (include_eye) {
    const auto h = intersect_eye(scene.eye(), ray);
    if (h && (!best || h->t < best->hit.t)) best = NearestHit{nullptr, true, *h};
  }
  return best;
}

Ray advanced(Ray r) {
  r.origin += r.direction * kSurfaceOffset;
  return r;
}

Interaction tmd_interaction(TmdMode m) {
  switch (m) {
    case TmdMode::double_reflect:
      return Interaction::tmd_double;
    case TmdMode::single_reflect_u:
      return Interaction::tmd_single_u;
    case TmdMode::single_reflect_v:
      return Interaction::tmd_single_v;
    case TmdMode::pass_through:
      return Interaction::tmd_pass;
    case TmdMode::absorbed:
      return Interaction::tmd_absorbed;
  }
  return Interaction::none;
}

std::uint64_t child_branch(std::uint64_t branch, int bounce) {
  return mix64(branch * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(bounce) + 1);
}

TracePath trace_branch(const Scene& scene, Ray ray, int bounce, int max_bounces, const RngStream& rng,
                       std::uint64_t branch) {
  TracePath path;
  for (;;) {
    const auto found = nearest(scene, ray, true);
    if (!found) {
      path.segments.push_back({ray, kInf, ray.origin, "", Interaction::none});
      path.terminal = Terminal::escaped;
      return path;
    }
    const SurfaceHit& hit = found->hit;
    PathSegment seg{ray, hit.t, hit.point, found->eye ? "eye" : found->element->id, Interaction::none};

    if (found->eye) {
      seg.interaction = Interaction::eye;
      path.segments.push_back(std::move(seg));
      path.terminal = Terminal::reached_eye;
      return path;
    }
    const ElementBody& body = found->element->body;
    if (std::holds_alternative<Screen>(body) || std::holds_alternative<Absorber>(body)) {
      seg.interaction = std::holds_alternative<Screen>(body) ? Interaction::screen : Interaction::absorber;
      path.segments.push_back(std::move(seg));
      path.terminal = Terminal::absorbed;
      return path;
    }
    if (bounce >= max_bounces) {
      path.segments.push_back(std::move(seg));
      path.terminal = Terminal::max_bounces;
      return path;
    }

    Ray next;
    std::optional<Ray> split;
    std::visit(Overloaded{
                   [&](const ThinLens& lens) {
                     seg.interaction = Interaction::lens;
                     next = thin_lens_transform_at(ray, lens, hit);
                   },
                   [&](const HalfMirror& mirror) {
                     const MirrorSplit s = half_mirror_interact_at(ray, mirror, hit);
                     // Ties continue along the reflected branch.
                     if (s.reflected.weight >= s.transmitted.weight) {
                       seg.interaction = Interaction::half_mirror_reflect;
                       next = s.reflected;
                       split = s.transmitted;
                     } else {
                       seg.interaction = Interaction::half_mirror_transmit;
                       next = s.transmitted;
                       split = s.reflected;
                     }
                   },
                   [&](const ConvexMirror&) {
                     seg.interaction = Interaction::mirror_reflect;
                     next = convex_mirror_transform_at(ray, hit);
                   },
                   [&](const TmdPlate& plate) {
                     const TmdMode mode =
                         classify_tmd_mode(plate.pose.dir_to_local(ray.direction), plate, rng.draw(branch, bounce));
                     seg.interaction = tmd_interaction(mode);
                     next = tmd_transform_at(ray, plate, hit, mode);
                     seg.end = next.origin;
                   },
                   [&](const auto&) {},
               },
               body);
    path.segments.push_back(std::move(seg));
    ++bounce;

    if (split && split->weight >= kPruneWeight) {
      path.children.push_back(
          trace_branch(scene, advanced(*split), bounce, max_bounces, rng, child_branch(branch, bounce)));
    }
    if (next.weight <= 0.0 || next.weight < kPruneWeight) {
      path.terminal = Terminal::absorbed;
      return path;
    }
    ray = advanced(next);
  }
}

void tally(const TracePath& path, BundleStats& stats) {
  ++stats.by_terminal[static_cast<int>(path.terminal)];
  if (path.terminal != Terminal::absorbed && !path.segments.empty()) {
    const Ray& r = path.last().ray;
    auto& t = stats.by_mode[static_cast<int>(r.mode)];
    ++t.count;
    t.weight += r.weight;
  }
  for (const auto& c : path.children) tally(c, stats);
}

void collect(const TracePath& path, const PathFilter& filter, std::vector<Ray>& out) {
  bool keep = filter.terminal ? path.terminal == *filter.terminal
                              : (path.terminal == Terminal::escaped || path.terminal == Terminal::reached_eye);
  if (keep && filter.mode) keep = path.last().ray.mode == *filter.mode;
  if (keep && path.last().ray.weight > 0.0) out.push_back(path.last().ray);
  for (const auto& c : path.children) collect(c, filter, out);
}

}  // namespace

const char* to_string(Interaction i) {
  switch (i) {
    case Interaction::none:
      return "none";
    case Interaction::lens:
      return "lens";
    case Interaction::half_mirror_reflect:
      return "half_mirror_reflect";
    case Interaction::half_mirror_transmit:
      return "half_mirror_transmit";
    case Interaction::mirror_reflect:
      return "mirror_reflect";
    case Interaction::tmd_double:
      return "tmd_double";
    case Interaction::tmd_single_u:
      return "tmd_single_u";
    case Interaction::tmd_single_v:
      return "tmd_single_v";
    case Interaction::tmd_pass:
      return "tmd_pass";
    case Interaction::tmd_absorbed:
      return "tmd_absorbed";
    case Interaction::screen:
      return "screen";
    case Interaction::absorber:
      return "absorber";
    case Interaction::eye:
      return "eye";
  }
  return "unknown";
}

const char* to_string(Terminal t) {
  switch (t) {
    case Terminal::absorbed:
      return "absorbed";
    case Terminal::escaped:
      return "escaped";
    case Terminal::reached_eye:
      return "reached_eye";
    case Terminal::max_bounces:
      return "max_bounces";
  }
  return "unknown";
}

std::optional<Terminal> terminal_from_string(const std::string& s) {
  for (Terminal t : {Terminal::absorbed, Terminal::escaped, Terminal::reached_eye, Terminal::max_bounces}) {
    if (s == to_string(t)) return t;
  }
  return std::nullopt;
}

std::optional<RayMode> ray_mode_from_string(const std::string& s) {
  for (RayMode m : {RayMode::primary, RayMode::double_reflect, RayMode::single_reflect, RayMode::pass_through}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

TracePath trace_ray(const Scene& scene, const Ray& ray, int max_bounces, const RngStream& rng) {
  if (max_bounces < 1) throw std::invalid_argument("max_bounces must be at least 1");
  return trace_branch(scene, ray, 0, max_bounces, rng, 0);
}

Vec3 cone_direction(const ConeSpec& cone, std::uint64_t i) {
  const Vec3 axis = normalize(cone.axis);
  const double cos_max = std::cos(cone.half_angle_deg * std::numbers::pi / 180.0);
  const double cos_t = 1.0 - radical_inverse(i, 2) * (1.0 - cos_max);
  const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
  const double phi = 2.0 * std::numbers::pi * radical_inverse(i, 3);
  const Vec3 helper = std::abs(axis.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 a = normalize(cross(helper, axis));
  const Vec3 b = cross(axis, a);
  return normalize(axis * cos_t + a * (sin_t * std::cos(phi)) + b * (sin_t * std::sin(phi)));
}

BundleResult trace_bundle(const Scene& scene, const Vec3& source, int n_rays, const ConeSpec& cone,
                          std::uint64_t seed, int max_bounces) {
  if (n_rays < 1) throw std::invalid_argument("n_rays must be at least 1");
  BundleResult result;
  result.seed = seed;
  result.paths.resize(static_cast<std::size_t>(n_rays));
  parallel_for(result.paths.size(), [&](std::size_t i) {
    const Ray ray = make_ray(source, cone_direction(cone, i));
    result.paths[i] = trace_ray(scene, ray, max_bounces, RngStream(seed, i));
  });
  result.stats.emitted_weight = static_cast<double>(n_rays);
  for (const auto& p : result.paths) tally(p, result.stats);
  return result;
}

std::vector<Ray> terminal_rays(const BundleResult& bundle, const PathFilter& filter) {
  std::vector<Ray> out;
  for (const auto& p : bundle.paths) collect(p, filter, out);
  return out;
}

SpotDiagram spot_diagram(const BundleResult& bundle, const Pose& plane, const PathFilter& filter) {
  SpotDiagram spot;
  for (const Ray& r : terminal_rays(bundle, filter)) {
    const Vec3 o = plane.to_local(r.origin);
    const Vec3 d = plane.dir_to_local(r.direction);
    if (std::abs(d.z) < kParallelEpsilon) continue;
    const double t = -o.z / d.z;
    spot.points.emplace_back(o.x + t * d.x, o.y + t * d.y);
  }
  if (spot.points.empty()) throw EmptySpot("no terminal segment crosses the spot plane");

  const double n = static_cast<double>(spot.points.size());
  for (const auto& [u, v] : spot.points) {
    spot.centroid_u += u;
    spot.centroid_v += v;
  }
  spot.centroid_u /= n;
  spot.centroid_v /= n;
  double ss = 0.0;
  for (const auto& [u, v] : spot.points) {
    const double du = u - spot.centroid_u;
    const double dv = v - spot.centroid_v;
    ss += du * du + dv * dv;
  }
  spot.rms_radius = std::sqrt(ss / n);
  return spot;
}

namespace {

bool probe(const Scene& scene, Ray ray, int depth) {
  for (; depth < 32; ++depth) {
    const auto found = nearest(scene, ray, false);
    if (!found) return false;
    const SurfaceHit& hit = found->hit;
    bool done = false;
    bool ok = false;
    Ray next = ray;
    std::visit(Overloaded{
                   [&](const Screen& s) {
                     done = true;
                     ok = dot(ray.direction, s.pose.w()) < 0.0;
                   },
                   [&](const Absorber&) { done = true; },
                   [&](const ThinLens& lens) { next = thin_lens_transform_at(ray, lens, hit); },
                   [&](const HalfMirror& mirror) {
                     const MirrorSplit s = half_mirror_interact_at(ray, mirror, hit);
                     done = true;
                     ok = probe(scene, advanced(s.reflected), depth + 1) ||
                          probe(scene, advanced(s.transmitted), depth + 1);
                   },
                   [&](const ConvexMirror&) { next = convex_mirror_transform_at(ray, hit); },
                   [&](const TmdPlate& plate) { next = tmd_transform_at(ray, plate, hit, TmdMode::double_reflect); },
               },
               found->element->body);
    if (done) return ok;
    ray = advanced(next);
  }
  return false;
}

Vec3 probe_direction(const EyeCamera& eye, double angle_rad) {
  return normalize(eye.forward() * std::cos(angle_rad) + eye.pose.u() * std::sin(angle_rad));
}

// Largest angle on one side (sign +1 or -1) for which probes still land.
double half_field(const Scene& scene, double sign) {
  constexpr double kStep = 0.05 * std::numbers::pi / 180.0;
  constexpr double kLimit = 89.9 * std::numbers::pi / 180.0;
  const auto lands = [&](double a) { return probe_reaches_screen(scene, probe_direction(scene.eye(), sign * a)); };
  double good = 0.0;
  double bad = -1.0;
  for (double a = kStep; a <= kLimit; a += kStep) {
    if (lands(a)) {
      good = a;
    } else {
      bad = a;
      break;
    }
  }
  if (bad < 0.0) return good;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (good + bad);
    (lands(mid) ? good : bad) = mid;
  }
  return good;
}

}  // namespace

bool probe_reaches_screen(const Scene& scene, const Vec3& direction) {
  return probe(scene, Ray{scene.eye().pose.position(), normalize(direction), 1.0, RayMode::primary}, 0);
}

double traced_fov_deg(const Scene& scene) {
  if (!probe_reaches_screen(scene, scene.eye().forward())) return 0.0;
  return (half_field(scene, 1.0) + half_field(scene, -1.0)) * 180.0 / std::numbers::pi;
}

}  // namespace ame
