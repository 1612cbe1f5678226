#include "ame/design.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "ame/errors.hpp"

namespace ame {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

double subtended_deg(double size, double distance) { return 2.0 * std::atan(size / (2.0 * distance)) * kDeg; }

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

const char* to_string(LimitingFactor f) {
  switch (f) {
    case LimitingFactor::tmd_window:
      return "tmd_window";
    case LimitingFactor::device_fov:
      return "device_fov";
    case LimitingFactor::lens_aperture:
      return "lens_aperture";
  }
  return "unknown";
}

double fov_half_mirror(double l1, double a, double d) {
  if (!(a + d > 0.0)) throw InvalidGeometry("a + d must be positive");
  if (!(l1 >= 0.0)) throw InvalidGeometry("l1 must be non-negative");
  return subtended_deg(l1, a + d);
}

ConvexFov fov_convex_mirror(double theta1_deg, double a_mag) {
  const double deg = theta1_deg * a_mag;
  if (deg > kMaxConvexFovDeg) return {kMaxConvexFovDeg, true};
  return {deg, false};
}

AmeFov fov_ame(const LayoutParams& p) {
  if (!(p.l2 > 0.0 && p.l3 > 0.0 && p.d2 > 0.0 && p.d4 > 0.0)) {
    throw InvalidGeometry("l2, l3, d2 and d4 must be positive");
  }
  if (!(p.theta_device > 0.0 && p.theta_device < 180.0)) {
    throw InvalidGeometry("device FOV must lie in (0, 180)");
  }
  AmeFov out;
  out.window_deg = subtended_deg(p.l3, p.d2);
  out.eyepiece_deg = subtended_deg(p.l2, p.d4);
  out.deg = p.theta_device;
  out.limit = LimitingFactor::device_fov;
  if (out.window_deg < out.deg) {
    out.deg = out.window_deg;
    out.limit = LimitingFactor::tmd_window;
  }
  if (out.eyepiece_deg < out.deg) {
    out.deg = out.eyepiece_deg;
    out.limit = LimitingFactor::lens_aperture;
  }
  return out;
}

Resolution resolution_estimate(const HmdSpec& hmd, double fov_deg, double pitch, double d4, double window) {
  if (pitch < 0.0) throw InvalidGeometry("pitch must be non-negative");
  Resolution r;
  r.device_px = hmd.per_eye_width_px;
  if (pitch > 0.0) {
    const double seen = std::min(window, 2.0 * d4 * std::tan(0.5 * fov_deg / kDeg));
    r.pitch_cells = seen / pitch;
  }
  r.effective_px = std::min(r.device_px, r.pitch_cells);
  r.arcmin_per_px = r.effective_px > 0.0 ? fov_deg * 60.0 / r.effective_px : 0.0;
  return r;
}

DesignReport design_report(const HmdSpec& hmd, LayoutParams params) {
  params.theta_device = hmd.fov_deg;
  DesignReport r;
  r.hmd = hmd.name;
  r.half_mirror_deg = fov_half_mirror(params.l1, params.a, params.d);
  const ConvexFov convex = fov_convex_mirror(r.half_mirror_deg, params.a_mag);
  r.convex_mirror_deg = convex.deg;
  r.convex_clamped = convex.clamped;
  r.ame = fov_ame(params);
  r.half_mirror_res = resolution_estimate(hmd, r.half_mirror_deg, 0.0, params.d4);
  r.convex_mirror_res = resolution_estimate(hmd, r.convex_mirror_deg, 0.0, params.d4);
  r.ame_res = resolution_estimate(hmd, r.ame.deg, params.pitch, params.d4, params.l3);
  return r;
}

std::string report_text(const DesignReport& r) {
  std::string s;
  const auto line = [&](const std::string& k, const std::string& v) { s += k + "," + v + "\n"; };
  line("hmd", r.hmd);
  line("half_mirror_fov_deg", fmt(r.half_mirror_deg));
  line("convex_mirror_fov_deg", fmt(r.convex_mirror_deg));
  line("convex_mirror_clamped", r.convex_clamped ? "1" : "0");
  line("ame_fov_deg", fmt(r.ame.deg));
  line("ame_window_fov_deg", fmt(r.ame.window_deg));
  line("ame_eyepiece_fov_deg", fmt(r.ame.eyepiece_deg));
  line("limiting_factor", to_string(r.ame.limit));
  line("effective_px", fmt(r.ame_res.effective_px));
  line("arcmin_per_px", fmt(r.ame_res.arcmin_per_px));
  return s;
}

std::string report_csv(const DesignReport& r) {
  std::string s = "architecture,fov_deg,limiting_factor,effective_px,arcmin_per_px\n";
  const auto row = [&](const char* name, double fov, const std::string& limit, const Resolution& res) {
    s += std::string(name) + "," + fmt(fov) + "," + limit + "," + fmt(res.effective_px) + "," +
         fmt(res.arcmin_per_px) + "\n";
  };
  row("half_mirror", r.half_mirror_deg, "screen_size", r.half_mirror_res);
  row("convex_mirror", r.convex_mirror_deg, r.convex_clamped ? "clamped" : "screen_size", r.convex_mirror_res);
  row("ame", r.ame.deg, to_string(r.ame.limit), r.ame_res);
  return s;
}

}  // namespace ame
