#pragma once

// Hand-rolled random generators for the property suites.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "ame/vec3.hpp"

namespace ame::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  Vec3 point(double extent) { return {uniform(-extent, extent), uniform(-extent, extent), uniform(-extent, extent)}; }

  Vec3 unit() {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 2.0 * std::numbers::pi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return normalize(Vec3{r * std::cos(phi), r * std::sin(phi), z});
  }

  /// Random right-handed orthonormal frame at `position`.
  Pose pose(const Vec3& position) {
    const Vec3 w = unit();
    const Vec3 helper = std::abs(w.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 u = normalize(cross(helper, w));
    Vec3 v = cross(w, u);
    const double a = uniform(0.0, 2.0 * std::numbers::pi);
    const Vec3 ru = u * std::cos(a) + v * std::sin(a);
    const Vec3 rv = cross(w, ru);
    return Pose(position, ru, rv, w);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace ame::testing
