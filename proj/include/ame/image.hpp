#pragma once

#include <cstddef>
#include <vector>

namespace ame {

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  Rgb operator+(const Rgb& o) const { return {r + o.r, g + o.g, b + o.b}; }
  Rgb operator*(double s) const { return {r * s, g * s, b * s}; }
  Rgb& operator+=(const Rgb& o) {
    r += o.r;
    g += o.g;
    b += o.b;
    return *this;
  }
  double luminance() const { return (r + g + b) / 3.0; }
  bool operator==(const Rgb&) const = default;
};

/// Row-major radiance image; row 0 is the top row.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {}) : width_(width), height_(height), pixels_(size(width, height), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  Rgb& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  const Rgb& at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  const std::vector<Rgb>& pixels() const { return pixels_; }
  std::vector<Rgb>& pixels() { return pixels_; }

  bool operator==(const Image&) const = default;

 private:
  static std::size_t size(int w, int h) {
    return w > 0 && h > 0 ? static_cast<std::size_t>(w) * static_cast<std::size_t>(h) : 0;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> pixels_;
};

}  // namespace ame
