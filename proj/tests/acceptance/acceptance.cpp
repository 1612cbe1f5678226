// One PASS/FAIL line per acceptance criterion; nonzero exit on any failure.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ame/design.hpp"
#include "ame/elements.hpp"
#include "ame/presets.hpp"
#include "ame/render.hpp"
#include "ame/tracer.hpp"
#include "support/generators.hpp"

using namespace ame;
using ame::testing::Gen;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail, double seconds) {
  std::printf("%s criterion %d: %s (%.2f s)\n", ok ? "PASS" : "FAIL", id, detail.c_str(), seconds);
  std::fflush(stdout);
  failures += !ok;
}

template <class Fn>
void criterion(int id, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = fn(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, ok, detail, s);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& env, const std::string& args) {
  const std::string cmd = env + " " + std::string(AME_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

double report_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + ",", 0) == 0) return std::stod(line.substr(key.size() + 1));
  }
  return std::nan("");
}

TmdParams ideal_tmd(double pitch = 0.0) {
  TmdParams t;
  t.pitch = pitch;
  t.weights = {1, 0, 0};
  return t;
}

EyeCamera far_eye() {
  EyeCamera e;
  e.pose = Pose::at({0, 1e5, 0});
  return e;
}

// 1. Aerial imaging of random point sources through an ideal plate.
bool aerial_imaging(std::string& detail) {
  Gen g(101);
  double worst = 0.0, worst_offset = 0.0;
  for (int i = 0; i < 100; ++i) {
    TmdPlate plate;
    plate.pose = g.pose(g.point(30));
    plate.extent = {300, 300};
    plate.weights = {1, 0, 0};
    const Scene s({{"tmd", plate}}, far_eye());
    const Vec3 local{g.uniform(-40, 40), g.uniform(-40, 40), -g.uniform(5, 100)};
    const Vec3 src = plate.pose.to_world(local);
    const BundleResult b = trace_bundle(s, src, 64, {plate.pose.w(), 20}, i);
    const auto rays = terminal_rays(b, {RayMode::double_reflect, std::nullopt});
    if (rays.size() != 64) {
      detail = "bundle lost rays";
      return false;
    }
    const ConvergencePoint c = closest_point_to_rays(rays);
    const Vec3 expected = plate.pose.to_world({local.x, local.y, -local.z});
    worst = std::max(worst, c.rms_residual);
    worst_offset = std::max(worst_offset, norm(c.point - expected));
  }
  detail = "100 sources, max rms residual " + fmt("%.3g", worst) + " mm, max offset from mirror point " +
           fmt("%.3g", worst_offset) + " mm";
  return worst < 1e-9 && worst_offset < 1e-6;
}

// 2. Device FOV caps the AME FOV in the CLI report.
bool device_cap(std::string& detail) {
  const Run dk2 = run("", "design --hmd dk2");
  const Run cb = run("", "design --hmd cardboard");
  const double a = report_value(dk2.out, "ame_fov_deg");
  const double b = report_value(cb.out, "ame_fov_deg");
  detail = "dk2 " + fmt("%.4f", a) + " deg, cardboard " + fmt("%.4f", b) + " deg";
  return dk2.code == 0 && cb.code == 0 && std::abs(a - 110.0) <= 0.01 && std::abs(b - 90.0) <= 0.01;
}

// 3. Closed-form FOV against edge rays traced through the built scene.
bool closed_vs_traced(std::string& detail) {
  Gen g(103);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double l1 = g.uniform(10, 80), a = g.uniform(10, 40), d = g.uniform(10, 40);
    worst = std::max(worst, std::abs(traced_fov_deg(half_mirror_preset(l1, a, d)) - fov_half_mirror(l1, a, d)));
  }
  for (int i = 0; i < 10; ++i) {
    LayoutParams p;
    p.l3 = g.uniform(40, 200);
    p.l2 = p.l3;
    p.d2 = g.uniform(20, 80);
    p.d4 = p.d2;
    p.theta_device = g.uniform(40, 150);
    const HmdSpec hmd{"random", p.theta_device, 0, 0, 1000, 1000};
    TmdParams tmd = ideal_tmd();
    tmd.size = p.l3;
    const Scene s = ame_preset(hmd, tmd, p.d2, p.d4);
    worst = std::max(worst, std::abs(traced_fov_deg(s) - fov_ame(p).deg));
  }
  detail = "10 half-mirror + 10 AME layouts, max |closed - traced| " + fmt("%.4f", worst) + " deg";
  return worst <= 0.5;
}

// 4. Smaller pitch, sharper image.
bool pitch_ordering(std::string& detail) {
  std::vector<double> rms;
  for (double p : {0.0, 0.1, 0.3, 0.5}) {
    const Scene s = tmd_see_through_preset(40, 60, 160, ideal_tmd(p));
    const Vec3 src = s.find("screen")->pose().position();
    const BundleResult b = trace_bundle(s, src, 2000, {{0, 1, 0}, 15}, 7);
    // Nominal image plane: d2 in front of the plate on the eye axis.
    rms.push_back(spot_diagram(b, Pose::at({0, 0, -100}), {RayMode::double_reflect, std::nullopt}).rms_radius);
  }
  bool ok = rms[0] < rms[1] && rms[1] < rms[2] && rms[2] < rms[3];

  std::vector<double> sharp;
  for (double p : {0.3, 0.5}) {
    TmdParams t;
    t.pitch = p;
    t.polarizer = true;
    const ExperimentSetup e = experiment_preset(false, t);
    sharp.push_back(sharpness_metric(render_view(e.scene, e.scene.eye())));
  }
  ok = ok && sharp[0] >= sharp[1];
  detail = "spot rms " + fmt("%.3g", rms[0]) + " < " + fmt("%.3g", rms[1]) + " < " + fmt("%.3g", rms[2]) + " < " +
           fmt("%.3g", rms[3]) + " mm; S(0.3) " + fmt("%.4f", sharp[0]) + " >= S(0.5) " + fmt("%.4f", sharp[1]);
  return ok;
}

// 5. Defocus sweep peaks at the in-focus position.
bool defocus_peak(std::string& detail) {
  bool ok = true;
  for (bool eyepiece : {false, true}) {
    const ExperimentSetup e = experiment_preset(eyepiece, ideal_tmd());
    const SweepResult r = defocus_sweep(e.scene, e.scene.eye(), kDefaultSweepOffsets, {}, false);
    detail += std::string(eyepiece ? "; eyepiece" : "no eyepiece") + " S =";
    for (double s : r.sharpness) detail += " " + fmt("%.4f", s);
    detail += " argmax " + fmt("%g", r.argmax_offset());
    ok = ok && r.argmax_offset() == 0.0;
  }
  return ok;
}

// 6. Polarizer removes the single-reflection ghost exactly.
bool ghost(std::string& detail) {
  const Scene base = *named_preset("tmd_see_through");
  EyeCamera eye = base.eye();
  eye.sensor = {64, 64, eye.sensor.pixel_pitch * 4};
  auto plate = std::get<TmdPlate>(base.find("tmd")->body);
  plate.weights = {0.6, 0.3, 0.1};
  const auto render_with = [&](bool polarizer, double ws) {
    TmdPlate p = plate;
    p.polarizer = polarizer;
    p.weights.p_single = ws;
    return render_view(base.with_element({"tmd", p}), eye);
  };
  const bool same = render_with(true, 0.3) == render_with(true, 0.0);
  const bool differ = !(render_with(false, 0.3) == render_with(false, 0.0));
  detail = std::string("polarized renders ") + (same ? "identical" : "differ") + ", unpolarized renders " +
           (differ ? "differ" : "identical");
  return same && differ;
}

// 7. Byte-identical CLI output across runs and worker counts.
bool determinism(std::string& detail) {
  const fs::path dir = fs::temp_directory_path() / "ame_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string trace = "trace preset:tmd_see_through --rays 2000 --seed 5";
  const std::string render = "render preset:tmd_see_through --width 64 --height 64 --rpp 8 --seed 5 --out ";
  const Run t1 = run("AME_WORKERS=1", trace);
  const Run t2 = run("AME_WORKERS=1", trace);
  const Run t4 = run("AME_WORKERS=4", trace);
  const Run r1 = run("AME_WORKERS=1", render + (dir / "a.ppm").string());
  const Run r2 = run("AME_WORKERS=1", render + (dir / "b.ppm").string());
  const Run r4 = run("AME_WORKERS=4", render + (dir / "c.ppm").string());
  const std::string a = slurp(dir / "a.ppm");
  const bool codes = t1.code == 0 && t2.code == 0 && t4.code == 0 && r1.code == 0 && r2.code == 0 && r4.code == 0;
  const bool trace_ok = !t1.out.empty() && t1.out == t2.out && t1.out == t4.out;
  const bool render_ok = !a.empty() && a == slurp(dir / "b.ppm") && a == slurp(dir / "c.ppm");
  fs::remove_all(dir);
  detail = std::string("trace ") + (trace_ok ? "identical" : "differs") + ", render " +
           (render_ok ? "identical" : "differs") + " across repeats and 1 vs 4 workers";
  return codes && trace_ok && render_ok;
}

// 8. Randomized invariants, 1000 cases each.
bool invariants(std::string& detail) {
  constexpr int n = 1000;
  Gen g(108);
  int bad_reflect = 0, bad_tmd = 0, bad_weight = 0, bad_mono = 0, bad_scale = 0;
  for (int i = 0; i < n; ++i) {
    const Vec3 d = g.unit(), nrm = g.unit();
    bad_reflect += norm(reflect(reflect(d, nrm), nrm) - d) > 1e-12 || std::abs(norm(reflect(d, nrm)) - 1) > 1e-12;
  }
  for (int i = 0; i < n; ++i) {
    TmdPlate plate;
    plate.pose = g.pose({0, 0, 0});
    plate.extent = {100, 100};
    Vec3 d = g.unit();
    if (std::abs(dot(d, plate.pose.w())) < 0.05) d = plate.pose.w();
    const Ray once = tmd_transform(make_ray(-d * 10.0, d), plate, TmdMode::double_reflect);
    const Ray twice = tmd_transform(make_ray(-once.direction * 10.0, once.direction), plate, TmdMode::double_reflect);
    bad_tmd += norm(twice.direction - d) > 1e-12;
  }
  const Scene hm = *named_preset("half_mirror");
  for (int i = 0; i < n; ++i) {
    const Pose pose = g.pose({0, 0, 0});
    Vec3 d = g.unit();
    if (std::abs(dot(d, pose.w())) < 0.05) d = pose.w();
    const double w = g.uniform(0, 1);
    const MirrorSplit s = half_mirror_interact(make_ray(-d * 10.0, d, w), HalfMirror{pose, {100, 100}, g.uniform(0, 1)});
    bad_weight += s.reflected.weight + s.transmitted.weight != w;
    const Vec3 dir = normalize(Vec3{g.uniform(-0.4, 0.4), g.uniform(-0.4, 0.4), -1});
    const TracePath path = trace_ray(hm, make_ray({0, 0, 0}, dir), 16, RngStream(i, 0));
    if (!path.children.empty()) {
      bad_weight += path.segments[1].ray.weight + path.children[0].segments[0].ray.weight != path.segments[0].ray.weight;
    }
  }
  for (int i = 0; i < n; ++i) {
    const double l1 = g.uniform(0.1, 200), a = g.uniform(1, 100), d = g.uniform(1, 100);
    const double f = fov_half_mirror(l1, a, d);
    bad_mono += !(fov_half_mirror(l1 * g.uniform(1.001, 2), a, d) > f) ||
                !(fov_half_mirror(l1, a + g.uniform(0.1, 10), d + g.uniform(0, 10)) < f);
    LayoutParams p;
    p.l1 = l1;
    p.l2 = g.uniform(1, 200);
    p.l3 = g.uniform(1, 200);
    p.a = a;
    p.d = d;
    p.d2 = g.uniform(1, 100);
    p.d4 = g.uniform(1, 100);
    p.theta_device = g.uniform(1, 179);
    LayoutParams q = p;
    const double k = std::exp(g.uniform(-4, 4));
    for (double* x : {&q.l1, &q.l2, &q.l3, &q.a, &q.d, &q.d2, &q.d4}) *x *= k;
    bad_scale += std::abs(fov_half_mirror(q.l1, q.a, q.d) - f) > 1e-9 || std::abs(fov_ame(q).deg - fov_ame(p).deg) > 1e-9;
  }
  detail = "failures: reflect " + std::to_string(bad_reflect) + ", tmd involution " + std::to_string(bad_tmd) +
           ", half-mirror weight " + std::to_string(bad_weight) + ", fov monotonicity " + std::to_string(bad_mono) +
           ", scale invariance " + std::to_string(bad_scale);
  return bad_reflect + bad_tmd + bad_weight + bad_mono + bad_scale == 0;
}

}  // namespace

int main() {
  criterion(1, aerial_imaging);
  criterion(2, device_cap);
  criterion(3, closed_vs_traced);
  criterion(4, pitch_ordering);
  criterion(5, defocus_peak);
  criterion(6, ghost);
  criterion(7, determinism);
  criterion(8, invariants);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
