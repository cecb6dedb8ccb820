#include "rdel/geometry.hpp"

#include <algorithm>
#include <functional>

namespace rdel {

Plane3 make_plane(const Point3& origin, const Vec3& normal) {
  const real n = norm(normal);
  if (!(n > 0)) throw DegenerateSimplex("make_plane: zero normal");
  return {origin, normal / n};
}

Box3 bounding_box(std::span<const Point3> pts) {
  Box3 b;
  for (const auto& p : pts) b.add(p);
  return b;
}

Ball3 circumball_tri3(const Point3& a, const Point3& b, const Point3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 n = cross(ab, ac);
  const real n2 = norm2(n);
  if (!(n2 > 1e-28 * norm2(ab) * norm2(ac))) {
    throw DegenerateSimplex("circumball_tri3: collinear triangle");
  }
  const Vec3 off = (cross(n, ab) * norm2(ac) + cross(ac, n) * norm2(ab)) / (2 * n2);
  const Point3 centre = a + off;
  // Average of the three distances keeps the residual symmetric.
  const real r = (distance(centre, a) + distance(centre, b) + distance(centre, c)) / 3;
  return {centre, r};
}

Point3 circumcentre_tet(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  const Vec3 ab = b - a, ac = c - a, ad = d - a;
  const real det = dot(ab, cross(ac, ad));
  const real scale = norm(ab) * norm(ac) * norm(ad);
  if (!(std::abs(det) > 1e-14 * scale)) {
    throw DegenerateSimplex("circumcentre_tet: flat tetrahedron");
  }
  const Vec3 num = cross(ac, ad) * norm2(ab) + cross(ad, ab) * norm2(ac) + cross(ab, ac) * norm2(ad);
  return a + num / (2 * det);
}

real radius_edge(const Point3& a, const Point3& b, const Point3& c) {
  // Sorted lengths and Kahan's area formula make the result independent of
  // vertex order.
  std::array<real, 3> l{distance(a, b), distance(b, c), distance(c, a)};
  std::sort(l.begin(), l.end(), std::greater<>());
  const real x = l[0], y = l[1], z = l[2];
  if (!(z > 0)) return std::numeric_limits<real>::infinity();
  const real prod = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
  if (!(prod > 0)) return std::numeric_limits<real>::infinity();
  const real area = 0.25 * std::sqrt(prod);
  return x * y / (4 * area);
}

int shortest_edge(const Point3& a, const Point3& b, const Point3& c) {
  const real l0 = distance2(a, b), l1 = distance2(b, c), l2 = distance2(c, a);
  if (l0 <= l1 && l0 <= l2) return 0;
  return l1 <= l2 ? 1 : 2;
}

// Region-based closest point (Ericson, Real-Time Collision Detection 5.1.5).
TriangleProjection closest_point_on_triangle(const Point3& p, const Point3& a, const Point3& b,
                                             const Point3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const real d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0) return {a, {1, 0, 0}};

  const Vec3 bp = p - b;
  const real d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3) return {b, {0, 1, 0}};

  const real vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    const real v = d1 / (d1 - d3);
    return {a + ab * v, {1 - v, v, 0}};
  }

  const Vec3 cp = p - c;
  const real d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6) return {c, {0, 0, 1}};

  const real vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    const real w = d2 / (d2 - d6);
    return {a + ac * w, {1 - w, 0, w}};
  }

  const real va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    const real w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {b + (c - b) * w, {0, 1 - w, w}};
  }

  const real denom = 1 / (va + vb + vc);
  const real v = vb * denom, w = vc * denom;
  return {a + ab * v + ac * w, {1 - v - w, v, w}};
}

}  // namespace rdel
