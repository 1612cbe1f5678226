#include "ame/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>

#include "ame/errors.hpp"
#include "ame/parallel.hpp"
#include "ame/random.hpp"

namespace ame {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Rgb emit_front(const Screen& screen, const Ray& ray, const SurfaceHit& hit) {
  if (dot(ray.direction, screen.pose.w()) >= 0.0) return {};
  const double w = screen.extent.width;
  const double h = screen.extent.height;
  const double u = std::clamp(hit.u + 0.5 * w, 0.0, w);
  const double v = std::clamp(hit.v + 0.5 * h, 0.0, h);
  return screen_emit(screen, u, v, -ray.direction);
}

Ray advanced(Ray r) {
  r.origin += r.direction * kSurfaceOffset;
  return r;
}

Rgb radiance(const Scene& scene, Ray ray, int depth, double weight) {
  while (depth > 0 && weight >= 1e-4) {
    const OpticalElement* best = nullptr;
    SurfaceHit best_hit;
    best_hit.t = kInf;
    for (const auto& e : scene.elements()) {
      const auto h = intersect(e, ray);
      if (h && h->t < best_hit.t) {
        best = &e;
        best_hit = *h;
      }
    }
    if (scene.background()) {
      const Screen& bg = *scene.background();
      const auto h = intersect_plane(ray, bg.pose, bg.extent);
      if (h && h->t < best_hit.t) return emit_front(bg, ray, {h->t, h->point, h->u, h->v, bg.pose.w()});
    }
    if (!best) return {};

    Rgb out;
    bool done = false;
    std::visit(Overloaded{
                   [&](const Screen& s) {
                     out = emit_front(s, ray, best_hit);
                     done = true;
                   },
                   [&](const Absorber&) { done = true; },
                   [&](const ThinLens& lens) { ray = thin_lens_transform_at(ray, lens, best_hit); },
                   [&](const ConvexMirror&) { ray = convex_mirror_transform_at(ray, best_hit); },
                   [&](const HalfMirror& mirror) {
                     const MirrorSplit s = half_mirror_interact_at(ray, mirror, best_hit);
                     out = radiance(scene, advanced(s.reflected), depth - 1, weight * s.reflected.weight) *
                               s.reflected.weight +
                           radiance(scene, advanced(s.transmitted), depth - 1, weight * s.transmitted.weight) *
                               s.transmitted.weight;
                     done = true;
                   },
                   [&](const TmdPlate& plate) {
                     const ModeWeights w = effective_mode_weights(plate, plate.pose.dir_to_local(ray.direction));
                     const std::pair<TmdMode, double> branches[] = {
                         {TmdMode::double_reflect, w.p_double},
                         {TmdMode::single_reflect_u, 0.5 * w.p_single},
                         {TmdMode::single_reflect_v, 0.5 * w.p_single},
                         {TmdMode::pass_through, w.p_pass},
                     };
                     for (const auto& [mode, share] : branches) {
                       if (!(share > 0.0)) continue;
                       const Ray next = tmd_transform_at(ray, plate, best_hit, mode);
                       out += radiance(scene, advanced(next), depth - 1, weight * share) * share;
                     }
                     done = true;
                   },
               },
               best->body);
    if (done) return out;
    ray = advanced(ray);
    --depth;
  }
  return {};
}

std::string fmt9(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

}  // namespace

Rgb trace_radiance(const Scene& scene, const Ray& ray, int max_depth) { return radiance(scene, ray, max_depth, 1.0); }

Image render_view(const Scene& scene, const EyeCamera& camera, const RenderOptions& options) {
  if (options.rays_per_pixel < 1) throw std::invalid_argument("rays_per_pixel must be at least 1");
  const int W = camera.sensor.width_px;
  const int H = camera.sensor.height_px;
  if (W < 1 || H < 1) throw std::invalid_argument("sensor must have at least one pixel");
  Image img(W, H);
  const double pitch = camera.sensor.pixel_pitch;
  const double f = camera.focal_length;
  const double lens_r = 0.5 * camera.aperture_diameter;
  const int n = options.rays_per_pixel;
  const Pose& pose = camera.pose;

  // One sample pattern shared by every pixel: a defocused render is then a
  // smooth average of shifted images rather than per-pixel noise.
  struct Sample {
    double jx, jy;
    Vec3 lens_point;
  };
  std::vector<Sample> samples(static_cast<std::size_t>(n));
  const double shift_r = uniform_draw(options.seed, 0, 0, 0);
  const double shift_phi = uniform_draw(options.seed, 0, 0, 1);
  const double shift_x = uniform_draw(options.seed, 0, 0, 2);
  const double shift_y = uniform_draw(options.seed, 0, 0, 3);
  for (int s = 0; s < n; ++s) {
    const auto si = static_cast<std::uint64_t>(s);
    Sample& smp = samples[si];
    smp.jx = n == 1 ? 0.5 : std::fmod(radical_inverse(si, 5) + shift_x, 1.0);
    smp.jy = n == 1 ? 0.5 : std::fmod(radical_inverse(si, 7) + shift_y, 1.0);
    const double hr = std::fmod(radical_inverse(si, 2) + shift_r, 1.0);
    const double hp = std::fmod(radical_inverse(si, 3) + shift_phi, 1.0);
    const double r = lens_r * std::sqrt(hr);
    const double phi = 2.0 * std::numbers::pi * hp;
    smp.lens_point = {r * std::cos(phi), r * std::sin(phi), 0.0};
  }

  parallel_for(static_cast<std::size_t>(H), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < W; ++x) {
      Rgb sum;
      for (const Sample& smp : samples) {
        const double sx = (x + smp.jx - 0.5 * W) * pitch;
        const double sy = (0.5 * H - (y + smp.jy)) * pitch;
        const Vec3 focus = Vec3{sx / f, sy / f, -1.0} * camera.focus_distance;
        const Vec3 origin = pose.to_world(smp.lens_point);
        const Vec3 dir = normalize(pose.dir_to_world(focus - smp.lens_point));
        sum += radiance(scene, Ray{origin, dir, 1.0, RayMode::primary}, options.max_depth, 1.0);
      }
      img.at(x, y) = sum * (1.0 / n);
    }
  });
  return img;
}

double sharpness_metric(const Image& img) {
  const int W = img.width();
  const int H = img.height();
  if (img.empty()) return 0.0;
  double mean = 0.0;
  for (const Rgb& p : img.pixels()) mean += p.luminance();
  mean /= static_cast<double>(img.pixels().size());
  if (!(mean > 0.0)) return 0.0;
  double energy = 0.0;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const double c = img.at(x, y).luminance();
      if (x + 1 < W) {
        const double g = img.at(x + 1, y).luminance() - c;
        energy += g * g;
      }
      if (y + 1 < H) {
        const double g = img.at(x, y + 1).luminance() - c;
        energy += g * g;
      }
    }
  }
  return energy / (static_cast<double>(W) * H) / (mean * mean);
}

double SweepResult::argmax_offset() const {
  if (offsets.empty()) throw std::invalid_argument("empty sweep");
  std::size_t best = 0;
  for (std::size_t i = 1; i < sharpness.size(); ++i) {
    if (sharpness[i] > sharpness[best]) best = i;
  }
  return offsets[best];
}

SweepResult defocus_sweep(const Scene& scene, const EyeCamera& camera, const std::vector<double>& offsets,
                          const RenderOptions& options, bool keep_images) {
  if (offsets.empty()) throw std::invalid_argument("offsets must not be empty");
  SweepResult out;
  for (const double off : offsets) {
    EyeCamera moved = camera;
    moved.pose = camera.pose.translated(camera.pose.w() * off);
    Image img = render_view(scene, moved, options);
    out.offsets.push_back(off);
    out.sharpness.push_back(sharpness_metric(img));
    if (keep_images) out.images.push_back(std::move(img));
  }
  return out;
}

std::vector<std::uint8_t> tone_map(const Image& img) {
  double max = 0.0;
  for (const Rgb& p : img.pixels()) max = std::max({max, p.r, p.g, p.b});
  std::vector<std::uint8_t> bytes;
  bytes.reserve(img.pixels().size() * 3);
  const auto q = [&](double x) -> std::uint8_t {
    if (!(max > 0.0)) return 0;
    return static_cast<std::uint8_t>(std::clamp(std::floor(x / max * 255.0 + 0.5), 0.0, 255.0));
  };
  for (const Rgb& p : img.pixels()) {
    bytes.push_back(q(p.r));
    bytes.push_back(q(p.g));
    bytes.push_back(q(p.b));
  }
  return bytes;
}

std::string encode_ppm(const Image& img) {
  std::string out = "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  const auto bytes = tone_map(img);
  out.append(bytes.begin(), bytes.end());
  return out;
}

void write_ppm(const Image& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  const std::string data = encode_ppm(img);
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!f) throw IoError("failed writing " + path);
}

Image read_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::string magic;
  int w = 0;
  int h = 0;
  int maxval = 0;
  f >> magic >> w >> h >> maxval;
  if (!f || magic != "P6" || w < 1 || h < 1 || maxval != 255) throw ParseError(1, "not an 8-bit P6 file");
  f.get();
  std::vector<unsigned char> data(static_cast<std::size_t>(w) * h * 3);
  f.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (f.gcount() != static_cast<std::streamsize>(data.size())) throw ParseError(1, "truncated pixel data");
  Image img(w, h);
  for (std::size_t i = 0; i < img.pixels().size(); ++i) {
    img.pixels()[i] = {data[3 * i] / 255.0, data[3 * i + 1] / 255.0, data[3 * i + 2] / 255.0};
  }
  return img;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string s = "offset_mm,sharpness\n";
  for (std::size_t i = 0; i < sweep.offsets.size(); ++i) {
    s += fmt9(sweep.offsets[i]) + "," + fmt9(sweep.sharpness[i]) + "\n";
  }
  return s;
}

void write_csv(const SweepResult& sweep, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << sweep_csv(sweep);
  if (!f) throw IoError("failed writing " + path);
}

}  // namespace ame
