// ame: design, trace, render and sweep front end.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ame/design.hpp"
#include "ame/errors.hpp"
#include "ame/presets.hpp"
#include "ame/render.hpp"
#include "ame/scene.hpp"
#include "ame/tracer.hpp"

namespace fs = std::filesystem;
using namespace ame;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kGeometry = 3, kNoSpot = 4, kIo = 5 };

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

Scene scene_from_arg(const std::string& arg) {
  constexpr std::string_view kPrefix = "preset:";
  if (arg.rfind(kPrefix, 0) == 0) {
    const std::string name = arg.substr(kPrefix.size());
    auto scene = named_preset(name);
    if (!scene) throw UsageError("unknown preset '" + name + "'");
    return *scene;
  }
  return load_scene(arg);
}

Vec3 to_vec(const std::vector<double>& v) { return {v.at(0), v.at(1), v.at(2)}; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

// ---------------------------------------------------------------- design

struct DesignArgs {
  std::string hmd;
  std::optional<double> fov_deg;
  int per_eye_width = 0;
  int per_eye_height = 0;
  LayoutParams layout;
  std::optional<double> l2;
  std::string csv;
};

int run_design(const DesignArgs& args) {
  HmdSpec hmd;
  if (!args.hmd.empty()) {
    auto found = find_hmd(args.hmd);
    if (!found) throw UsageError("unknown HMD '" + args.hmd + "'");
    hmd = *found;
  } else if (args.fov_deg && args.per_eye_width > 0) {
    hmd = HmdSpec{"custom", *args.fov_deg, 2 * args.per_eye_width, args.per_eye_height, args.per_eye_width,
                  args.per_eye_height};
  } else {
    throw UsageError("give --hmd or both --fov and --per-eye-width");
  }
  if (!(hmd.fov_deg > 0.0 && hmd.fov_deg < 180.0)) throw UsageError("device FOV must lie in (0, 180)");

  LayoutParams p = args.layout;
  p.l2 = args.l2.value_or(p.l3);
  const DesignReport report = design_report(hmd, p);
  std::cout << report_text(report);
  if (!args.csv.empty()) write_text(args.csv, report_csv(report));
  return kOk;
}

// ----------------------------------------------------------------- trace

struct TraceArgs {
  std::string scene;
  std::vector<double> source;
  std::vector<double> cone_axis;
  double cone_deg = 5.0;
  int rays = 1000;
  std::uint64_t seed = 42;
  int max_bounces = 16;
  std::optional<double> spot_z;
  std::string mode;
  std::string terminal;
  std::string out;
};

// First screen position, or the origin.
Vec3 default_source(const Scene& scene) {
  for (const auto& e : scene.elements()) {
    if (std::holds_alternative<Screen>(e.body)) return e.pose().position();
  }
  return {};
}

// Toward the nearest element that does not sit at the source.
Vec3 default_axis(const Scene& scene, const Vec3& source) {
  std::optional<Vec3> best;
  for (const auto& e : scene.elements()) {
    const Vec3 d = e.pose().position() - source;
    if (norm(d) < 1e-9) continue;
    if (!best || norm(d) < norm(*best)) best = d;
  }
  return best ? normalize(*best) : scene.eye().forward();
}

int run_trace(const TraceArgs& args) {
  const Scene scene = scene_from_arg(args.scene);
  const Vec3 source = args.source.empty() ? default_source(scene) : to_vec(args.source);
  const Vec3 axis = args.cone_axis.empty() ? default_axis(scene, source) : to_vec(args.cone_axis);
  if (norm(axis) == 0.0) throw UsageError("cone axis must be nonzero");

  PathFilter filter;
  const bool has_tmd = std::any_of(scene.elements().begin(), scene.elements().end(),
                                   [](const OpticalElement& e) { return std::holds_alternative<TmdPlate>(e.body); });
  if (args.mode.empty()) {
    // The real image is carried by the double-reflection rays.
    if (has_tmd) filter.mode = RayMode::double_reflect;
  } else if (args.mode != "all") {
    filter.mode = ray_mode_from_string(args.mode);
    if (!filter.mode) throw UsageError("unknown mode '" + args.mode + "'");
  }
  if (!args.terminal.empty()) {
    filter.terminal = terminal_from_string(args.terminal);
    if (!filter.terminal) throw UsageError("unknown terminal '" + args.terminal + "'");
  }

  const BundleResult bundle =
      trace_bundle(scene, source, args.rays, ConeSpec{axis, args.cone_deg}, args.seed, args.max_bounces);

  double plane_z = 0.0;
  if (args.spot_z) {
    plane_z = *args.spot_z;
  } else {
    const auto rays = terminal_rays(bundle, filter);
    if (rays.empty()) throw EmptySpot("no terminal rays match the filter");
    plane_z = closest_point_to_rays(rays).point.z;
  }
  const SpotDiagram spot = spot_diagram(bundle, Pose::at({0, 0, plane_z}), filter);

  std::string csv = "u_mm,v_mm\n";
  for (const auto& [u, v] : spot.points) csv += fmt("%.9g", u) + "," + fmt("%.9g", v) + "\n";

  std::string stats = "# rms_mm=" + fmt("%.9g", spot.rms_radius) + " points=" + std::to_string(spot.points.size()) +
                      " plane_z=" + fmt("%.9g", plane_z) +
                      " mode=" + (filter.mode ? to_string(*filter.mode) : "all");
  for (RayMode m : {RayMode::primary, RayMode::double_reflect, RayMode::single_reflect, RayMode::pass_through}) {
    stats += std::string(" ") + to_string(m) + "=" + std::to_string(bundle.stats.mode(m).count);
  }
  for (Terminal t : {Terminal::absorbed, Terminal::escaped, Terminal::reached_eye, Terminal::max_bounces}) {
    stats += std::string(" ") + to_string(t) + "=" + std::to_string(bundle.stats.terminal(t));
  }
  stats += "\n";

  if (args.out.empty()) {
    std::cout << csv << stats;
  } else {
    write_text(args.out, csv);
    std::cout << stats;
  }
  return kOk;
}

// ---------------------------------------------------------------- render

struct CameraArgs {
  int width = 0;
  int height = 0;
  std::optional<double> pixel_pitch;
  std::optional<double> focus;
  std::optional<double> aperture;
  int rpp = 16;
  std::uint64_t seed = 42;
};

EyeCamera camera_for(const Scene& scene, const CameraArgs& args) {
  EyeCamera cam = scene.eye();
  if (args.pixel_pitch) {
    cam.sensor.pixel_pitch = *args.pixel_pitch;
  } else if (args.width > 0) {
    // Same horizontal field at the new resolution.
    cam.sensor.pixel_pitch *= static_cast<double>(cam.sensor.width_px) / args.width;
  }
  if (args.width > 0) cam.sensor.width_px = args.width;
  if (args.height > 0) cam.sensor.height_px = args.height;
  if (args.focus) cam.focus_distance = *args.focus;
  if (args.aperture) cam.aperture_diameter = *args.aperture;
  return cam;
}

struct RenderArgs {
  std::string scene;
  std::string out = "render.ppm";
  double offset = 0.0;
  CameraArgs camera;
};

int run_render(const RenderArgs& args) {
  const Scene scene = scene_from_arg(args.scene);
  EyeCamera cam = camera_for(scene, args.camera);
  cam.pose = cam.pose.translated(cam.pose.w() * args.offset);
  const Image img = render_view(scene, cam, {args.camera.rpp, args.camera.seed});
  write_ppm(img, args.out);
  std::cout << "sharpness," << fmt("%.9g", sharpness_metric(img)) << "\n";
  return kOk;
}

struct SweepArgs {
  std::string scene;
  std::string out_dir = ".";
  std::vector<double> offsets = kDefaultSweepOffsets;
  CameraArgs camera;
};

int run_sweep(const SweepArgs& args) {
  const Scene scene = scene_from_arg(args.scene);
  const fs::path dir(args.out_dir);
  ensure_dir(dir);
  const SweepResult sweep =
      defocus_sweep(scene, camera_for(scene, args.camera), args.offsets, {args.camera.rpp, args.camera.seed});
  for (std::size_t i = 0; i < sweep.offsets.size(); ++i) {
    write_ppm(sweep.images[i], (dir / ("offset_" + fmt("%g", sweep.offsets[i]) + ".ppm")).string());
  }
  write_csv(sweep, (dir / "sweep.csv").string());
  std::cout << sweep_csv(sweep) << "argmax_offset_mm," << fmt("%g", sweep.argmax_offset()) << "\n";
  return kOk;
}

// --------------------------------------------------------------- presets

struct PresetArgs {
  std::string name;
  std::string out_dir;
};

int run_presets(const PresetArgs& args) {
  if (!args.name.empty()) {
    auto scene = named_preset(args.name);
    if (!scene) throw UsageError("unknown preset '" + args.name + "'");
    std::cout << serialize_scene(*scene);
    return kOk;
  }
  if (!args.out_dir.empty()) {
    const fs::path dir(args.out_dir);
    ensure_dir(dir);
    for (const auto& name : preset_names()) {
      write_text(dir / (name + ".scene"), serialize_scene(*named_preset(name)));
      std::cout << (dir / (name + ".scene")).string() << "\n";
    }
    return kOk;
  }
  for (const auto& name : preset_names()) std::cout << name << "\n";
  return kOk;
}

void add_camera_flags(CLI::App* cmd, CameraArgs& cam) {
  cmd->add_option("--rpp", cam.rpp, "Rays per pixel")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cam.seed, "Random seed");
  cmd->add_option("--width", cam.width, "Sensor width in px")->check(CLI::PositiveNumber);
  cmd->add_option("--height", cam.height, "Sensor height in px")->check(CLI::PositiveNumber);
  cmd->add_option("--pixel-pitch", cam.pixel_pitch, "Sensor pixel pitch (mm)")->check(CLI::PositiveNumber);
  cmd->add_option("--focus", cam.focus, "Focus distance (mm)")->check(CLI::PositiveNumber);
  cmd->add_option("--aperture", cam.aperture, "Aperture diameter (mm)")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TMD display simulator"};
  app.require_subcommand(1);

  DesignArgs design;
  auto* design_cmd = app.add_subcommand("design", "Closed-form FOV and resolution report");
  design_cmd->add_option("--hmd", design.hmd, "Built-in HMD (cardboard, dk2)");
  design_cmd->add_option("--fov", design.fov_deg, "Custom device FOV (degrees)");
  design_cmd->add_option("--per-eye-width", design.per_eye_width, "Custom per-eye width (px)");
  design_cmd->add_option("--per-eye-height", design.per_eye_height, "Custom per-eye height (px)");
  design_cmd->add_option("--l1", design.layout.l1, "Screen size (mm)");
  design_cmd->add_option("--l2", design.l2, "Eyepiece lens size (mm), defaults to l3");
  design_cmd->add_option("--l3", design.layout.l3, "TMD size (mm)");
  design_cmd->add_option("--a", design.layout.a, "Eye to half mirror (mm)");
  design_cmd->add_option("--d", design.layout.d, "Half mirror to screen (mm)");
  design_cmd->add_option("--d2", design.layout.d2, "TMD to HMD (mm)");
  design_cmd->add_option("--d4", design.layout.d4, "TMD to eye (mm)");
  design_cmd->add_option("--a-mag", design.layout.a_mag, "Curved mirror magnification");
  design_cmd->add_option("--pitch", design.layout.pitch, "TMD pitch (mm)");
  design_cmd->add_option("--csv", design.csv, "Also write the report as CSV");

  TraceArgs trace;
  auto* trace_cmd = app.add_subcommand("trace", "Trace a point-source bundle and print its spot diagram");
  trace_cmd->add_option("scene", trace.scene, "Scene file or preset:<name>")->required();
  trace_cmd->add_option("--source", trace.source, "Source point x,y,z (mm)")->delimiter(',')->expected(3);
  trace_cmd->add_option("--cone-axis", trace.cone_axis, "Cone axis x,y,z")->delimiter(',')->expected(3);
  trace_cmd->add_option("--cone-deg", trace.cone_deg, "Cone half angle (degrees)")->check(CLI::Range(0.0, 90.0));
  trace_cmd->add_option("--rays", trace.rays, "Number of rays")->check(CLI::PositiveNumber);
  trace_cmd->add_option("--seed", trace.seed, "Random seed");
  trace_cmd->add_option("--max-bounces", trace.max_bounces, "Interaction limit")->check(CLI::PositiveNumber);
  trace_cmd->add_option("--spot-plane", trace.spot_z, "z of the spot plane (default: best focus)");
  trace_cmd->add_option("--mode", trace.mode, "Keep rays whose last mode is this, or all (default: double_reflect if the scene has a TMD)");
  trace_cmd->add_option("--terminal", trace.terminal, "Keep paths with this terminal");
  trace_cmd->add_option("--out", trace.out, "Write the spot CSV here instead of stdout");

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "Render the eye view to a PPM");
  render_cmd->add_option("scene", render.scene, "Scene file or preset:<name>")->required();
  render_cmd->add_option("--out", render.out, "Output PPM");
  render_cmd->add_option("--offset", render.offset, "Move the camera back along its axis (mm)");
  add_camera_flags(render_cmd, render.camera);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Defocus sweep: one PPM per offset plus sweep.csv");
  sweep_cmd->add_option("scene", sweep.scene, "Scene file or preset:<name>")->required();
  sweep_cmd->add_option("--out-dir", sweep.out_dir, "Output directory");
  sweep_cmd->add_option("--offsets", sweep.offsets, "Camera offsets (mm)")->delimiter(',');
  add_camera_flags(sweep_cmd, sweep.camera);

  PresetArgs presets;
  auto* presets_cmd = app.add_subcommand("presets", "List or dump the built-in scenes");
  presets_cmd->add_option("--name", presets.name, "Print one preset as a scene file");
  presets_cmd->add_option("--out-dir", presets.out_dir, "Write every preset as <name>.scene");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*design_cmd) return run_design(design);
    if (*trace_cmd) return run_trace(trace);
    if (*render_cmd) return run_render(render);
    if (*sweep_cmd) return run_sweep(sweep);
    if (*presets_cmd) return run_presets(presets);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid scene: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidGeometry& e) {
    std::cerr << "invalid geometry: " << e.what() << "\n";
    return kGeometry;
  } catch (const EmptySpot& e) {
    std::cerr << "empty spot: " << e.what() << "\n";
    return kNoSpot;
  } catch (const DegenerateBundle& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return kNoSpot;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
