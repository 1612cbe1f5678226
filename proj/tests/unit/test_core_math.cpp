#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ame/errors.hpp"
#include "ame/geometry.hpp"

using namespace ame;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void expect_vec(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

}  // namespace

TEST(Reflect, NormalIncidenceReverses) { expect_vec(reflect({0, 0, -1}, {0, 0, 1}), {0, 0, 1}, 0.0); }

TEST(Reflect, GrazingRayUnchanged) { expect_vec(reflect({1, 0, 0}, {0, 0, 1}), {1, 0, 0}, 0.0); }

TEST(Reflect, FortyFiveDegrees) {
  const double h = std::sqrt(2.0) / 2.0;
  // d - 2(d.n)n with d.n = -h flips only the z component.
  expect_vec(reflect({h, 0, -h}, {0, 0, 1}), {h, 0, h}, 1e-15);
}

TEST(Normalize, UnitWithinTolerance) {
  const Vec3 d = normalize(Vec3{3, -4, 12});
  EXPECT_NEAR(norm(d), 1.0, 1e-12);
  expect_vec(d, {3.0 / 13, -4.0 / 13, 12.0 / 13}, 1e-15);
}

TEST(Ray, MakeRayNormalizes) {
  const Ray r = make_ray({1, 2, 3}, {0, 0, 5});
  EXPECT_EQ(r.direction, (Vec3{0, 0, 1}));
  EXPECT_EQ(r.weight, 1.0);
  EXPECT_EQ(r.mode, RayMode::primary);
  expect_vec(r.at(2.0), {1, 2, 5}, 0.0);
}

TEST(Pose, RejectsNonOrthonormalAxes) {
  EXPECT_THROW(Pose({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0.1, 1}), std::invalid_argument);
  EXPECT_THROW(Pose({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, -1}), std::invalid_argument);  // left-handed
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Pose({0, 0, 0}, {nan, 0, 0}, {0, 1, 0}, {0, 0, 1}), std::invalid_argument);
}

TEST(Pose, LocalWorldRoundTrip) {
  const Pose p = Pose::facing({1, 2, 3}, normalize(Vec3{0, 1, 1}), {0, 0, 1});
  const Vec3 q{4, -5, 6};
  expect_vec(p.to_world(p.to_local(q)), q, 1e-12);
  EXPECT_LT(p.orthonormality_error(), 1e-12);
  const Pose r = Pose::from_rotation(p.position(), p.rotation());
  expect_vec(r.u(), p.u(), 0.0);
  expect_vec(r.w(), p.w(), 0.0);
}

TEST(IntersectPlane, HeadOn) {
  const auto hit = intersect_plane(make_ray({0, 0, -10}, {0, 0, 1}), Pose::at({0, 0, 0}), {50, 50});
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(hit->t, 10.0);
  EXPECT_DOUBLE_EQ(hit->u, 0.0);
  EXPECT_DOUBLE_EQ(hit->v, 0.0);
}

TEST(IntersectPlane, ParallelRayMisses) {
  EXPECT_FALSE(intersect_plane(make_ray({0, 0, -10}, {1, 0, 0}), Pose::at({0, 0, 0}), {50, 50}));
}

TEST(IntersectPlane, OutsideExtentMisses) {
  // Hit at u = 100 lies outside the 25 mm half width.
  EXPECT_FALSE(intersect_plane(make_ray({100, 0, -10}, {0, 0, 1}), Pose::at({0, 0, 0}), {50, 50}));
  EXPECT_TRUE(intersect_plane(make_ray({100, 0, -10}, {0, 0, 1}), Pose::at({0, 0, 0}), {kInf, kInf}));
}

TEST(IntersectPlane, BehindOriginMisses) {
  EXPECT_FALSE(intersect_plane(make_ray({0, 0, 10}, {0, 0, 1}), Pose::at({0, 0, 0}), {50, 50}));
}

TEST(ClosestPoint, TwoCrossingRays) {
  const Vec3 target{1, 2, 3};
  const std::vector<Ray> rays{make_ray(target - Vec3{5, 0, 0}, {1, 0, 0}), make_ray(target - Vec3{0, 3, 4}, {0, 3, 4})};
  const auto c = closest_point_to_rays(rays);
  expect_vec(c.point, target, 1e-12);
  EXPECT_LT(c.rms_residual, 1e-12);
}

TEST(ClosestPoint, SkewPairMidpoint) {
  // Lines x-axis at z=0 and y-axis at z=2: closest point (0,0,1), distance 1 to each.
  const std::vector<Ray> rays{make_ray({-3, 0, 0}, {1, 0, 0}), make_ray({0, -3, 2}, {0, 1, 0})};
  const auto c = closest_point_to_rays(rays);
  expect_vec(c.point, {0, 0, 1}, 1e-12);
  EXPECT_NEAR(c.rms_residual, 1.0, 1e-12);
}

TEST(ClosestPoint, ParallelRaysAreDegenerate) {
  const std::vector<Ray> rays{make_ray({0, 0, 0}, {0, 0, 1}), make_ray({1, 0, 0}, {0, 0, 1})};
  EXPECT_THROW(closest_point_to_rays(rays), DegenerateBundle);
  EXPECT_THROW(closest_point_to_rays(std::vector<Ray>{make_ray({0, 0, 0}, {0, 0, 1})}), DegenerateBundle);
}

TEST(DistanceToLine, Perpendicular) {
  EXPECT_DOUBLE_EQ(distance_to_line({0, 3, 7}, make_ray({0, 0, 0}, {0, 0, 1})), 3.0);
}
