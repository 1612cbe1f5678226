#pragma once

#include <array>
#include <cmath>
#include <ostream>

namespace ame {

/// Lengths are millimeters throughout; directions are dimensionless.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalize(const Vec3& v) { return v / norm(v); }

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
  return os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
}

/// Which TMD interaction a ray last went through.
enum class RayMode { primary, double_reflect, single_reflect, pass_through };

const char* to_string(RayMode m);

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit
  double weight = 1.0;
  RayMode mode = RayMode::primary;

  Vec3 at(double t) const { return origin + direction * t; }
};

/// Builds a ray with a normalized direction.
inline Ray make_ray(const Vec3& origin, const Vec3& direction, double weight = 1.0,
                    RayMode mode = RayMode::primary) {
  return Ray{origin, normalize(direction), weight, mode};
}

/// Rigid placement of an element. The rotation columns are the local u, v, w
/// axes expressed in world coordinates; w is the element normal.
class Pose {
 public:
  Pose() = default;

  /// Throws std::invalid_argument when the axes are not orthonormal and
  /// right-handed within 1e-10.
  Pose(const Vec3& position, const Vec3& u, const Vec3& v, const Vec3& w);

  /// Pose from a position, a normal and an in-plane "up" hint. u = up x w.
  static Pose facing(const Vec3& position, const Vec3& normal, const Vec3& up_hint);

  /// Identity orientation at `position`.
  static Pose at(const Vec3& position) { return Pose(position, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}); }

  const Vec3& position() const { return position_; }
  const Vec3& u() const { return u_; }
  const Vec3& v() const { return v_; }
  const Vec3& w() const { return w_; }

  /// Row-major 3x3, rows are world x, y, z; columns are u, v, w.
  std::array<double, 9> rotation() const;
  static Pose from_rotation(const Vec3& position, const std::array<double, 9>& r);

  Vec3 to_local(const Vec3& p) const {
    const Vec3 d = p - position_;
    return {dot(d, u_), dot(d, v_), dot(d, w_)};
  }
  Vec3 dir_to_local(const Vec3& d) const { return {dot(d, u_), dot(d, v_), dot(d, w_)}; }
  Vec3 to_world(const Vec3& local) const { return position_ + dir_to_world(local); }
  Vec3 dir_to_world(const Vec3& d) const { return u_ * d.x + v_ * d.y + w_ * d.z; }

  Pose translated(const Vec3& delta) const {
    Pose p = *this;
    p.position_ += delta;
    return p;
  }

  /// Largest |R R^T - I| entry.
  double orthonormality_error() const;

 private:
  Vec3 position_;
  Vec3 u_{1, 0, 0};
  Vec3 v_{0, 1, 0};
  Vec3 w_{0, 0, 1};
};

}  // namespace ame
