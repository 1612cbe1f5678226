#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ame/image.hpp"
#include "ame/scene.hpp"

namespace ame {

struct RenderOptions {
  int rays_per_pixel = 16;
  std::uint64_t seed = 42;
  int max_depth = 12;
};

/// Backward render through a thin-lens camera. Aperture and sub-pixel
/// samples come from a Halton set rotated by the seed and shared by all
/// pixels. At a TMD the radiance is split over
/// the double, single and pass modes by their weights, so the result
/// depends only on the seed.
Image render_view(const Scene& scene, const EyeCamera& camera, const RenderOptions& options = {});

/// Radiance seen along one ray (used by render_view).
Rgb trace_radiance(const Scene& scene, const Ray& ray, int max_depth);

/// Mean squared forward-difference gradient of luminance over mean
/// luminance squared; 0 for a dark image.
double sharpness_metric(const Image& img);

struct SweepResult {
  std::vector<double> offsets;
  std::vector<double> sharpness;
  std::vector<Image> images;

  /// Offset with the largest sharpness (first on ties).
  double argmax_offset() const;
};

inline const std::vector<double> kDefaultSweepOffsets{10.0, 0.0, -10.0, -20.0};

/// Renders with the camera moved `offset` mm back along its viewing axis
/// (positive is farther from the target); focus is left unchanged.
SweepResult defocus_sweep(const Scene& scene, const EyeCamera& camera, const std::vector<double>& offsets,
                          const RenderOptions& options = {}, bool keep_images = true);

/// 8-bit tone map: round(x / max * 255) per channel, max over all channels.
std::vector<std::uint8_t> tone_map(const Image& img);

/// Binary P6 with maxval 255. Throws IoError.
void write_ppm(const Image& img, const std::string& path);
std::string encode_ppm(const Image& img);

/// Reads a P6 file back as values in [0, 1]. Throws IoError or ParseError.
Image read_ppm(const std::string& path);

/// `offset_mm,sharpness` then one row per offset, 9 significant digits.
void write_csv(const SweepResult& sweep, const std::string& path);
std::string sweep_csv(const SweepResult& sweep);

}  // namespace ame
