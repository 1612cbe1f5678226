#pragma once

#include <limits>
#include <string>

#include "ame/scene.hpp"

namespace ame {

/// Layout lengths in mm, angles in degrees. `a` is the eye to half-mirror
/// distance; `a_mag` is the curved mirror's angular magnification.
struct LayoutParams {
  double l1 = 60.0;   // screen size
  double l2 = 120.0;  // eyepiece lens size
  double l3 = 120.0;  // TMD size
  double a = 20.0;
  double d = 20.0;
  double d2 = 40.0;  // TMD to HMD
  double d4 = 40.0;  // TMD to eye
  double a_mag = 1.5;
  double theta_device = 90.0;
  double pitch = 0.0;  // TMD pitch
};

enum class LimitingFactor { tmd_window, device_fov, lens_aperture };

const char* to_string(LimitingFactor f);

/// Full angle subtended by a screen of size l1 at distance a + d.
/// Throws InvalidGeometry if a + d <= 0 or l1 < 0.
double fov_half_mirror(double l1, double a, double d);

struct ConvexFov {
  double deg = 0.0;
  bool clamped = false;
};

inline constexpr double kMaxConvexFovDeg = 179.9;

/// theta1 * a_mag, capped at 179.9 degrees.
ConvexFov fov_convex_mirror(double theta1_deg, double a_mag);

struct AmeFov {
  double deg = 0.0;
  LimitingFactor limit = LimitingFactor::device_fov;
  double window_deg = 0.0;
  double eyepiece_deg = 0.0;
};

/// Smallest of the TMD window angle 2 atan(l3 / 2 d2), the eyepiece angle
/// 2 atan(l2 / 2 d4) and the device FOV. Ties resolve to the device, then
/// the window. Throws InvalidGeometry on nonpositive lengths.
AmeFov fov_ame(const LayoutParams& params);

struct Resolution {
  double device_px = 0.0;  // per-eye horizontal pixels
  double pitch_cells = std::numeric_limits<double>::infinity();
  double effective_px = 0.0;
  double arcmin_per_px = 0.0;
};

/// Device limit is the per-eye width; pitch limit is the number of cells of
/// size `pitch` across the part of the TMD seen over `fov_deg` from d4,
/// capped by `window` (the TMD size) when given.
Resolution resolution_estimate(const HmdSpec& hmd, double fov_deg, double pitch, double d4,
                               double window = std::numeric_limits<double>::infinity());

struct DesignReport {
  std::string hmd;
  double half_mirror_deg = 0.0;
  double convex_mirror_deg = 0.0;
  bool convex_clamped = false;
  AmeFov ame;
  Resolution half_mirror_res;
  Resolution convex_mirror_res;
  Resolution ame_res;
};

/// The three architectures side by side. `params.theta_device` is taken
/// from `hmd`.
DesignReport design_report(const HmdSpec& hmd, LayoutParams params);

/// `key,value` lines.
std::string report_text(const DesignReport& report);

/// Header plus one row per architecture.
std::string report_csv(const DesignReport& report);

}  // namespace ame
