#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rdel/geometry.hpp"
#include "rdel/predicates.hpp"

using namespace rdel;

namespace {

// Independent circumcentre: solve the 3x3 system 2(p_i - p_0).x = |p_i|^2 - |p_0|^2
// by Cramer's rule.
Point3 solve3(const std::array<Vec3, 3>& rows, const Vec3& rhs) {
  auto det = [](const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); };
  const Vec3 c0{rows[0].x, rows[1].x, rows[2].x};
  const Vec3 c1{rows[0].y, rows[1].y, rows[2].y};
  const Vec3 c2{rows[0].z, rows[1].z, rows[2].z};
  const real d = det(c0, c1, c2);
  return {det(rhs, c1, c2) / d, det(c0, rhs, c2) / d, det(c0, c1, rhs) / d};
}

Point3 oracle_circumcentre_tri(const Point3& a, const Point3& b, const Point3& c) {
  const Vec3 n = cross(b - a, c - a);
  return solve3({(b - a) * 2, (c - a) * 2, n},
                {norm2(b) - norm2(a), norm2(c) - norm2(a), dot(n, a)});
}

Point3 oracle_circumcentre_tet(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  return solve3({(b - a) * 2, (c - a) * 2, (d - a) * 2},
                {norm2(b) - norm2(a), norm2(c) - norm2(a), norm2(d) - norm2(a)});
}

real min_angle(const Point3& a, const Point3& b, const Point3& c) {
  auto ang = [](const Vec3& u, const Vec3& v) { return std::acos(std::clamp(dot(u, v) / (norm(u) * norm(v)), -1.0, 1.0)); };
  return std::min({ang(b - a, c - a), ang(a - b, c - b), ang(a - c, b - c)});
}

}  // namespace

TEST(Orient3d, CanonicalCases) {
  const Point3 a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0};
  EXPECT_EQ(orient3d(a, b, c, {0, 0, 1}), 1);
  EXPECT_EQ(orient3d(a, b, c, {1, 1, 0}), 0);
  EXPECT_EQ(orient3d(a, b, c, {0, 0, -1}), -1);
}

TEST(Orient3d, PermutationParity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<real> u(-1, 1);
  for (int k = 0; k < 500; ++k) {
    Point3 p[4];
    for (auto& q : p) q = {u(rng), u(rng), u(rng)};
    const int s = orient3d(p[0], p[1], p[2], p[3]);
    EXPECT_EQ(orient3d(p[1], p[0], p[2], p[3]), -s);
    EXPECT_EQ(orient3d(p[0], p[2], p[1], p[3]), -s);
    EXPECT_EQ(orient3d(p[1], p[2], p[0], p[3]), s);
    EXPECT_EQ(orient3d(p[1], p[0], p[3], p[2]), s);
  }
}

TEST(Orient3d, NearDegenerateIsExact) {
  // d is exactly on the plane x + y + z = 1 after rounding-free construction,
  // then nudged by one ulp in z.
  const Point3 a{1, 0, 0}, b{0, 1, 0}, c{0, 0, 1};
  const Point3 on{0.25, 0.25, 0.5};
  EXPECT_EQ(orient3d(a, b, c, on), 0);
  const Point3 above{0.25, 0.25, std::nextafter(0.5, 1.0)};
  const Point3 below{0.25, 0.25, std::nextafter(0.5, 0.0)};
  EXPECT_EQ(orient3d(a, b, c, above), -orient3d(a, b, c, below));
  EXPECT_NE(orient3d(a, b, c, above), 0);
  // Shifting by a large offset keeps the coplanar decision exact.
  const Vec3 s{1e8, 1e8, 1e8};
  EXPECT_EQ(orient3d(a + s, b + s, c + s, on + s), 0);
}

TEST(Insphere, UnitTetCases) {
  const Point3 a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0}, d{0, 0, 1};
  EXPECT_EQ(insphere(a, b, c, d, {0.25, 0.25, 0.25}), 1);
  EXPECT_EQ(insphere(a, b, c, d, {10, 10, 10}), -1);
  EXPECT_EQ(insphere(a, b, c, d, a), 0);
  // orientation independent
  EXPECT_EQ(insphere(b, a, c, d, {0.25, 0.25, 0.25}), 1);
  EXPECT_EQ(insphere(b, a, c, d, {10, 10, 10}), -1);
}

TEST(Insphere, CoplanarBaseThrows) {
  EXPECT_THROW(insphere({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0, 0, 1}), DegenerateSimplex);
}

TEST(Insphere, CosphericalTieIsExact) {
  // The cube corner (1,1,1) lies on the circumsphere of the corner tet.
  const Point3 a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0}, d{0, 0, 1};
  EXPECT_EQ(insphere(a, b, c, d, {1, 1, 1}), 0);
  EXPECT_EQ(insphere(a, b, c, d, {1, 1, 0}), 0);
}

TEST(InspherePerturbed, QueryWithLargestIdIsOutside) {
  const Point3 a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0}, d{0, 0, 1}, e{1, 1, 1};
  EXPECT_EQ(insphere_perturbed({&a, &b, &c, &d, &e}, {0, 1, 2, 3, 4}), -1);
  // A tet vertex with the largest id: (1,1,1) replaces d on the far side of
  // face abc, so the sphere bulges toward e.
  const int s = insphere_perturbed({&a, &b, &c, &d, &e}, {0, 1, 2, 9, 4});
  EXPECT_NE(s, 0);
}

TEST(InspherePerturbed, ConsistentAcrossOrientation) {
  const Point3 a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0}, d{0, 0, 1}, e{1, 1, 1};
  for (std::int64_t big = 0; big < 4; ++big) {
    std::array<std::int64_t, 5> ids{0, 1, 2, 3, 4};
    ids[big] = 10;
    const int s1 = insphere_perturbed({&a, &b, &c, &d, &e}, ids);
    std::array<std::int64_t, 5> ids2{ids[1], ids[0], ids[2], ids[3], ids[4]};
    const int s2 = insphere_perturbed({&b, &a, &c, &d, &e}, ids2);
    EXPECT_EQ(s1, s2) << "largest id at slot " << big;
  }
}

TEST(CircumballTri3, TextbookCases) {
  const Ball3 eq = circumball_tri3({0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0});
  EXPECT_NEAR(eq.radius, 1 / std::sqrt(3.0), 1e-12);
  const Ball3 rt = circumball_tri3({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  EXPECT_NEAR(rt.centre.x, 0.5, 1e-15);
  EXPECT_NEAR(rt.centre.y, 0.5, 1e-15);
  EXPECT_NEAR(rt.centre.z, 0.0, 1e-15);
  EXPECT_NEAR(rt.radius, std::sqrt(2.0) / 2, 1e-15);
}

TEST(CircumballTri3, CollinearThrows) {
  EXPECT_THROW(circumball_tri3({0, 0, 0}, {1, 0, 0}, {2, 0, 0}), DegenerateSimplex);
}

TEST(CircumballTri3, RandomAgainstLinearSystem) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<real> u(-3, 3);
  for (int k = 0; k < 1000; ++k) {
    const Point3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)}, c{u(rng), u(rng), u(rng)};
    const Ball3 ball = circumball_tri3(a, b, c);
    const Point3 ref = oracle_circumcentre_tri(a, b, c);
    EXPECT_LE(distance(ball.centre, ref), 1e-9 * ball.radius);
    for (const auto& p : {a, b, c}) EXPECT_LE(std::abs(distance(ball.centre, p) - ball.radius), 1e-9 * ball.radius);
    const Vec3 n = normalized(cross(b - a, c - a));
    EXPECT_LE(std::abs(dot(ball.centre - a, n)), 1e-9 * ball.radius);
  }
}

TEST(CircumcentreTet, SymmetricCases) {
  const real s = 1 / std::sqrt(3.0);
  const Point3 cc = circumcentre_tet({s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s});
  EXPECT_NEAR(norm(cc), 0, 1e-15);
  const Point3 corner = circumcentre_tet({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1});
  EXPECT_NEAR(corner.x, 0.5, 1e-15);
  EXPECT_NEAR(corner.y, 0.5, 1e-15);
  EXPECT_NEAR(corner.z, 0.5, 1e-15);
  EXPECT_THROW(circumcentre_tet({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}), DegenerateSimplex);
}

TEST(CircumcentreTet, RandomAgainstLinearSystem) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<real> u(-2, 2);
  for (int k = 0; k < 1000; ++k) {
    const Point3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)}, c{u(rng), u(rng), u(rng)},
        d{u(rng), u(rng), u(rng)};
    const Point3 cc = circumcentre_tet(a, b, c, d);
    const Point3 ref = oracle_circumcentre_tet(a, b, c, d);
    const real r = distance(cc, a);
    EXPECT_LE(distance(cc, ref), 1e-9 * r);
    for (const auto& p : {b, c, d}) EXPECT_LE(std::abs(distance(cc, p) - r), 1e-9 * r);
  }
}

TEST(RadiusEdge, KnownValues) {
  EXPECT_NEAR(radius_edge({0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}), 1 / std::sqrt(3.0), 1e-12);
  // 30-60-90 triangle: min angle 30 deg gives rho = 1
  EXPECT_NEAR(radius_edge({0, 0, 0}, {std::sqrt(3.0), 0, 0}, {0, 1, 0}), 1.0, 1e-12);
  // needle: frozen from the closed form R = abc/(4A) with A = 5e-4
  const real l = std::hypot(0.5, 1e-3);
  const real expected = (l * l * 1.0 / (4 * 5e-4)) / l;
  EXPECT_NEAR(radius_edge({0, 0, 0}, {1, 0, 0}, {0.5, 1e-3, 0}), expected, 1e-9 * expected);
  EXPECT_NEAR(expected, 250.0005, 1e-3);
  EXPECT_TRUE(std::isinf(radius_edge({0, 0, 0}, {1, 0, 0}, {2, 0, 0})));
  EXPECT_TRUE(std::isinf(radius_edge({0, 0, 0}, {0, 0, 0}, {2, 0, 0})));
}

TEST(RadiusEdge, MatchesMinimumAngleRelation) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<real> u(-1, 1);
  for (int k = 0; k < 2000; ++k) {
    const Point3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)}, c{u(rng), u(rng), u(rng)};
    const real rho = radius_edge(a, b, c);
    const real ref = 1 / (2 * std::sin(min_angle(a, b, c)));
    EXPECT_NEAR(rho, ref, 1e-9 * ref);
  }
}

TEST(ClosestPointOnTriangle, Regions) {
  const Point3 a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0};
  auto pr = closest_point_on_triangle({0.2, 0.2, 5}, a, b, c);
  EXPECT_NEAR(distance(pr.point, {0.2, 0.2, 0}), 0, 1e-15);
  pr = closest_point_on_triangle({-1, -1, 0}, a, b, c);
  EXPECT_EQ(pr.point, a);
  pr = closest_point_on_triangle({1, 1, 0}, a, b, c);
  EXPECT_NEAR(distance(pr.point, {0.5, 0.5, 0}), 0, 1e-15);
  EXPECT_NEAR(pr.bary[1], 0.5, 1e-15);
  EXPECT_NEAR(pr.bary[2], 0.5, 1e-15);
}
