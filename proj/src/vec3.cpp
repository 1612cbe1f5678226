#include "ame/vec3.hpp"

#include <algorithm>
#include <stdexcept>

namespace ame {

const char* to_string(RayMode m) {
  switch (m) {
    case RayMode::primary:
      return "primary";
    case RayMode::double_reflect:
      return "double_reflect";
    case RayMode::single_reflect:
      return "single_reflect";
    case RayMode::pass_through:
      return "pass_through";
  }
  return "unknown";
}

Pose::Pose(const Vec3& position, const Vec3& u, const Vec3& v, const Vec3& w)
    : position_(position), u_(u), v_(v), w_(w) {
  if (!(orthonormality_error() <= 1e-10)) {
    throw std::invalid_argument("pose orientation is not orthonormal");
  }
  if (!(norm(cross(u, v) - w) <= 1e-10)) {
    throw std::invalid_argument("pose orientation is not right-handed");
  }
}

Pose Pose::facing(const Vec3& position, const Vec3& normal, const Vec3& up_hint) {
  const Vec3 w = normalize(normal);
  const Vec3 u = normalize(cross(up_hint, w));
  const Vec3 v = cross(w, u);
  return Pose(position, u, v, w);
}

std::array<double, 9> Pose::rotation() const {
  return {u_.x, v_.x, w_.x, u_.y, v_.y, w_.y, u_.z, v_.z, w_.z};
}

Pose Pose::from_rotation(const Vec3& position, const std::array<double, 9>& r) {
  return Pose(position, {r[0], r[3], r[6]}, {r[1], r[4], r[7]}, {r[2], r[5], r[8]});
}

double Pose::orthonormality_error() const {
  const Vec3 axes[3] = {u_, v_, w_};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(dot(axes[i], axes[j]) - expected));
    }
  }
  return worst;
}

}  // namespace ame
