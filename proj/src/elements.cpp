#include "ame/elements.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ame/errors.hpp"

namespace ame {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::optional<SurfaceHit> plane_hit(const Ray& ray, const Pose& pose, const Extent& extent) {
  const auto hit = intersect_plane(ray, pose, extent);
  if (!hit) return std::nullopt;
  return SurfaceHit{hit->t, hit->point, hit->u, hit->v, pose.w()};
}

}  // namespace

// ---------------------------------------------------------------- patterns

const char* to_string(PatternKind k) {
  switch (k) {
    case PatternKind::uniform:
      return "uniform";
    case PatternKind::checker:
      return "checker";
    case PatternKind::quadrants:
      return "quadrants";
  }
  return "unknown";
}

std::optional<PatternKind> pattern_from_string(const std::string& s) {
  if (s == "uniform") return PatternKind::uniform;
  if (s == "checker") return PatternKind::checker;
  if (s == "quadrants") return PatternKind::quadrants;
  return std::nullopt;
}

Image make_pattern(const PatternSpec& spec) {
  Image img(spec.width_px, spec.height_px);
  const double L = spec.radiance;
  const int cell = std::max(1, spec.width_px / std::max(1, spec.cells));
  for (int y = 0; y < spec.height_px; ++y) {
    for (int x = 0; x < spec.width_px; ++x) {
      Rgb c;
      switch (spec.kind) {
        case PatternKind::uniform:
          c = {L, L, L};
          break;
        case PatternKind::checker:
          c = ((x / cell + y / cell) % 2 == 0) ? Rgb{L, L, L} : Rgb{};
          break;
        case PatternKind::quadrants: {
          const bool right = 2 * x >= spec.width_px;
          const bool bottom = 2 * y >= spec.height_px;
          if (!right && !bottom) c = {L, 0, 0};
          if (right && !bottom) c = {0, L, 0};
          if (!right && bottom) c = {0, 0, L};
          if (right && bottom) c = {L, L, L};
          break;
        }
      }
      img.at(x, y) = c;
    }
  }
  return img;
}

Screen Screen::with_pattern(const Pose& pose, const Extent& extent, const PatternSpec& pattern,
                            bool flip_u, bool flip_v) {
  return Screen{pose, extent, pattern, make_pattern(pattern), flip_u, flip_v};
}

// ----------------------------------------------------------------- element

const Pose& OpticalElement::pose() const {
  return std::visit([](const auto& e) -> const Pose& { return e.pose; }, body);
}

const char* OpticalElement::kind() const {
  return std::visit(Overloaded{
                        [](const ThinLens&) { return "lens"; },
                        [](const HalfMirror&) { return "half_mirror"; },
                        [](const ConvexMirror&) { return "convex_mirror"; },
                        [](const TmdPlate&) { return "tmd"; },
                        [](const Screen&) { return "screen"; },
                        [](const Absorber&) { return "absorber"; },
                    },
                    body);
}

std::optional<SurfaceHit> intersect(const ThinLens& lens, const Ray& ray) {
  auto hit = plane_hit(ray, lens.pose, {kInf, kInf});
  if (!hit) return std::nullopt;
  const double r = 0.5 * lens.aperture_diameter;
  if (hit->u * hit->u + hit->v * hit->v > r * r) return std::nullopt;
  return hit;
}

double ConvexMirror::radius() const {
  if (is_flat()) return kInf;
  return 2.0 * reference_distance * magnification / (magnification - 1.0);
}

bool ConvexMirror::is_flat() const { return std::abs(magnification - 1.0) < 1e-12; }

std::optional<SurfaceHit> intersect(const ConvexMirror& mirror, const Ray& ray) {
  if (mirror.is_flat()) return plane_hit(ray, mirror.pose, mirror.extent);

  const double R = mirror.radius();
  const Vec3 center = mirror.pose.position() + mirror.pose.w() * R;
  const Vec3 oc = ray.origin - center;
  const double b = dot(oc, ray.direction);
  const double c = dot(oc, oc) - R * R;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  for (const double t : {-b - sq, -b + sq}) {
    if (!(t > kHitEpsilon)) continue;
    const Vec3 p = ray.at(t);
    // Keep only the cap around the vertex, not the far side of the sphere.
    if (dot(p - center, mirror.pose.w()) * R >= 0.0) continue;
    const Vec3 local = mirror.pose.to_local(p);
    if (std::abs(local.x) > 0.5 * mirror.extent.width || std::abs(local.y) > 0.5 * mirror.extent.height) {
      continue;
    }
    return SurfaceHit{t, p, local.x, local.y, (center - p) / R};
  }
  return std::nullopt;
}

std::optional<SurfaceHit> intersect(const OpticalElement& element, const Ray& ray) {
  return std::visit(Overloaded{
                        [&](const ThinLens& e) { return intersect(e, ray); },
                        [&](const ConvexMirror& e) { return intersect(e, ray); },
                        [&](const Absorber& e) -> std::optional<SurfaceHit> {
                          auto hit = plane_hit(ray, e.pose, e.extent);
                          const double r = 0.5 * e.hole_diameter;
                          if (hit && hit->u * hit->u + hit->v * hit->v < r * r) return std::nullopt;
                          return hit;
                        },
                        [&](const auto& e) { return plane_hit(ray, e.pose, e.extent); },
                    },
                    element.body);
}

// --------------------------------------------------------------- thin lens

Ray thin_lens_transform_at(const Ray& ray, const ThinLens& lens, const SurfaceHit& hit) {
  const Vec3 d = lens.pose.dir_to_local(ray.direction);
  const double along = std::abs(d.z);
  const double sign = d.z >= 0.0 ? 1.0 : -1.0;
  const double su = d.x / along - hit.u / lens.focal_length;
  const double sv = d.y / along - hit.v / lens.focal_length;
  const Vec3 out = normalize(lens.pose.dir_to_world({su, sv, sign}));
  return Ray{hit.point, out, ray.weight, ray.mode};
}

Ray thin_lens_transform(const Ray& ray, const ThinLens& lens) {
  const auto hit = intersect(lens, ray);
  if (!hit) throw NoIntersection("ray misses the lens aperture");
  return thin_lens_transform_at(ray, lens, *hit);
}

// --------------------------------------------------------------------- TMD

const char* to_string(TmdMode m) {
  switch (m) {
    case TmdMode::double_reflect:
      return "double_reflect";
    case TmdMode::single_reflect_u:
      return "single_reflect_u";
    case TmdMode::single_reflect_v:
      return "single_reflect_v";
    case TmdMode::pass_through:
      return "pass_through";
    case TmdMode::absorbed:
      return "absorbed";
  }
  return "unknown";
}

ModeWeights effective_mode_weights(const TmdPlate& plate, const Vec3& incidence_local) {
  ModeWeights w = plate.weights;
  if (plate.angular_fill) {
    const double lateral = std::hypot(incidence_local.x, incidence_local.y);
    const double along = std::abs(incidence_local.z);
    const double tan_theta = along > 0.0 ? lateral / along : kInf;
    w.p_double = std::clamp(w.p_double * (1.0 - tan_theta / (2.0 * plate.mirror_ratio)), 0.0, 1.0);
  }
  if (plate.polarizer) w.p_single = 0.0;
  return w;
}

TmdMode classify_tmd_mode(const Vec3& incidence_local, const TmdPlate& plate, double draw) {
  const ModeWeights w = effective_mode_weights(plate, incidence_local);
  // The single-reflection interval keeps its nominal width under a
  // polarizer; its mass is absorbed rather than handed to other modes.
  const double single_width = plate.weights.p_single;
  const double single_end = w.p_double + single_width;
  if (draw < w.p_double) return TmdMode::double_reflect;
  if (draw < single_end) {
    if (plate.polarizer) return TmdMode::absorbed;
    return draw < w.p_double + 0.5 * single_width ? TmdMode::single_reflect_u : TmdMode::single_reflect_v;
  }
  if (draw < single_end + w.p_pass) return TmdMode::pass_through;
  return TmdMode::absorbed;
}

std::pair<double, double> quantize_to_cell(double u, double v, double pitch) {
  return {(std::floor(u / pitch) + 0.5) * pitch, (std::floor(v / pitch) + 0.5) * pitch};
}

Ray tmd_transform_at(const Ray& ray, const TmdPlate& plate, const SurfaceHit& hit, TmdMode mode) {
  Vec3 d = plate.pose.dir_to_local(ray.direction);
  RayMode tag = ray.mode;
  switch (mode) {
    case TmdMode::double_reflect:
      d = {-d.x, -d.y, d.z};
      tag = RayMode::double_reflect;
      break;
    case TmdMode::single_reflect_u:
      d = {-d.x, d.y, d.z};
      tag = RayMode::single_reflect;
      break;
    case TmdMode::single_reflect_v:
      d = {d.x, -d.y, d.z};
      tag = RayMode::single_reflect;
      break;
    case TmdMode::pass_through:
      tag = RayMode::pass_through;
      break;
    case TmdMode::absorbed:
      return Ray{hit.point, ray.direction, 0.0, ray.mode};
  }

  Vec3 origin = hit.point;
  if (plate.pitch > 0.0 && mode != TmdMode::pass_through) {
    const auto [qu, qv] = quantize_to_cell(hit.u, hit.v, plate.pitch);
    origin = plate.pose.to_world({qu, qv, 0.0});
  }
  return Ray{origin, plate.pose.dir_to_world(d), ray.weight, tag};
}

Ray tmd_transform(const Ray& ray, const TmdPlate& plate, TmdMode mode) {
  const auto hit = plane_hit(ray, plate.pose, plate.extent);
  if (!hit) throw NoIntersection("ray misses the TMD plate");
  return tmd_transform_at(ray, plate, *hit, mode);
}

// ------------------------------------------------------------- half mirror

MirrorSplit half_mirror_interact_at(const Ray& ray, const HalfMirror& mirror, const SurfaceHit& hit) {
  // The larger share is a product, the smaller an exact (Sterbenz)
  // difference, so the two weights add back to ray.weight exactly.
  double reflected_w;
  double transmitted_w;
  if (mirror.reflectance >= 0.5) {
    reflected_w = ray.weight * mirror.reflectance;
    transmitted_w = ray.weight - reflected_w;
  } else {
    transmitted_w = ray.weight * (1.0 - mirror.reflectance);
    reflected_w = ray.weight - transmitted_w;
  }
  return {Ray{hit.point, reflect(ray.direction, mirror.pose.w()), reflected_w, ray.mode},
          Ray{hit.point, ray.direction, transmitted_w, ray.mode}};
}

MirrorSplit half_mirror_interact(const Ray& ray, const HalfMirror& mirror) {
  const auto hit = plane_hit(ray, mirror.pose, mirror.extent);
  if (!hit) throw NoIntersection("ray misses the half mirror");
  return half_mirror_interact_at(ray, mirror, *hit);
}

// ----------------------------------------------------------- curved mirror

Ray convex_mirror_transform_at(const Ray& ray, const SurfaceHit& hit) {
  return Ray{hit.point, normalize(reflect(ray.direction, hit.normal)), ray.weight, ray.mode};
}

Ray convex_mirror_transform(const Ray& ray, const ConvexMirror& mirror) {
  const auto hit = intersect(mirror, ray);
  if (!hit) throw NoIntersection("ray misses the mirror");
  return convex_mirror_transform_at(ray, *hit);
}

// ------------------------------------------------------------------ screen

Rgb screen_emit(const Screen& screen, double u, double v, const Vec3& /*toward*/) {
  const double w = screen.extent.width;
  const double h = screen.extent.height;
  if (!(u >= 0.0 && u <= w && v >= 0.0 && v <= h)) throw OutOfBounds("sample outside screen extent");
  if (screen.image.empty()) return {};
  if (screen.flip_u) u = w - u;
  if (screen.flip_v) v = h - v;

  const int W = screen.image.width();
  const int H = screen.image.height();
  const double x = u / w * W - 0.5;
  const double y = (h - v) / h * H - 0.5;  // row 0 sits at v = height
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const double ax = x - fx;
  const double ay = y - fy;
  const int x0 = std::clamp(static_cast<int>(fx), 0, W - 1);
  const int x1 = std::clamp(static_cast<int>(fx) + 1, 0, W - 1);
  const int y0 = std::clamp(static_cast<int>(fy), 0, H - 1);
  const int y1 = std::clamp(static_cast<int>(fy) + 1, 0, H - 1);
  const Image& img = screen.image;
  const Rgb top = img.at(x0, y0) * (1.0 - ax) + img.at(x1, y0) * ax;
  const Rgb bottom = img.at(x0, y1) * (1.0 - ax) + img.at(x1, y1) * ax;
  return top * (1.0 - ay) + bottom * ay;
}

}  // namespace ame
