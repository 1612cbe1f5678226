#include "ame/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ame/errors.hpp"

namespace ame {

std::optional<PlaneHit> intersect_plane(const Ray& ray, const Pose& pose, const Extent& extent) {
  const double denom = dot(ray.direction, pose.w());
  if (std::abs(denom) < kParallelEpsilon) return std::nullopt;
  const double t = dot(pose.position() - ray.origin, pose.w()) / denom;
  if (!(t > kHitEpsilon)) return std::nullopt;

  const Vec3 point = ray.at(t);
  const Vec3 rel = point - pose.position();
  const double u = dot(rel, pose.u());
  const double v = dot(rel, pose.v());
  if (std::abs(u) > 0.5 * extent.width || std::abs(v) > 0.5 * extent.height) return std::nullopt;
  return PlaneHit{t, point, u, v};
}

double distance_to_line(const Vec3& p, const Ray& ray) {
  const Vec3 rel = p - ray.origin;
  return norm(rel - ray.direction * dot(rel, ray.direction));
}

ConvergencePoint closest_point_to_rays(std::span<const Ray> rays) {
  if (rays.size() < 2) throw DegenerateBundle("need at least two rays");

  // Work relative to the mean origin to keep the right-hand side small.
  Vec3 center;
  for (const Ray& r : rays) center += r.origin;
  center = center / static_cast<double>(rays.size());

  // Sum of projectors onto each line's normal space, (I - d d^T).
  Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (const Ray& r : rays) {
    const Eigen::Vector3d d(r.direction.x, r.direction.y, r.direction.z);
    const Vec3 rel = r.origin - center;
    const Eigen::Vector3d o(rel.x, rel.y, rel.z);
    const Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - d * d.transpose();
    normal += proj;
    rhs += proj * o;
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(normal);
  const Eigen::Vector3d lambda = eig.eigenvalues();  // ascending
  if (!(lambda(0) > 0.0) || lambda(2) / lambda(0) > 1e12) {
    throw DegenerateBundle("ray bundle is parallel; normal matrix is singular");
  }
  const Eigen::Vector3d x = eig.eigenvectors() *
                            (lambda.cwiseInverse().asDiagonal() * (eig.eigenvectors().transpose() * rhs));

  const Vec3 point = center + Vec3{x(0), x(1), x(2)};
  double sum_sq = 0.0;
  for (const Ray& r : rays) {
    const double dist = distance_to_line(point, r);
    sum_sq += dist * dist;
  }
  return {point, std::sqrt(sum_sq / static_cast<double>(rays.size()))};
}

}  // namespace ame
