#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace rdel {

using real = double;

/// Point or free vector in R^3. Plain aggregate; all arithmetic is inline.
struct Vec3 {
  real x = 0, y = 0, z = 0;

  constexpr real operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr real& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr Vec3& operator*=(real s) { x *= s; y *= s; z *= s; return *this; }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

using Point3 = Vec3;

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, real s) { return a *= s; }
constexpr Vec3 operator*(real s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, real s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr real dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr real norm2(const Vec3& a) { return dot(a, a); }
inline real norm(const Vec3& a) { return std::sqrt(norm2(a)); }
inline real distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
constexpr real distance2(const Vec3& a, const Vec3& b) { return norm2(a - b); }
constexpr Point3 midpoint(const Point3& a, const Point3& b) { return (a + b) * real(0.5); }

inline Vec3 normalized(const Vec3& a) {
  const real n = norm(a);
  return n > 0 ? a / n : Vec3{};
}

inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

struct Ball3 {
  Point3 centre;
  real radius = 0;
};

/// Plane with unit normal. Use make_plane() to normalise an arbitrary normal.
struct Plane3 {
  Point3 origin;
  Vec3 normal{0, 0, 1};

  real signed_distance(const Point3& p) const { return dot(p - origin, normal); }
};

Plane3 make_plane(const Point3& origin, const Vec3& normal);

/// Axis-aligned box; empty() until something is added.
struct Box3 {
  Vec3 lo{std::numeric_limits<real>::infinity(), std::numeric_limits<real>::infinity(),
          std::numeric_limits<real>::infinity()};
  Vec3 hi{-std::numeric_limits<real>::infinity(), -std::numeric_limits<real>::infinity(),
          -std::numeric_limits<real>::infinity()};

  bool empty() const { return lo.x > hi.x; }
  void add(const Point3& p) {
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  void add(const Box3& b) {
    if (b.empty()) return;
    add(b.lo);
    add(b.hi);
  }
  Point3 centre() const { return midpoint(lo, hi); }
  Vec3 extent() const { return hi - lo; }
  real diagonal() const { return empty() ? 0 : norm(hi - lo); }
  /// Squared distance from p to the box (0 inside).
  real distance2(const Point3& p) const {
    real d = 0;
    for (int i = 0; i < 3; ++i) {
      const real e = std::max({lo[i] - p[i], real(0), p[i] - hi[i]});
      d += e * e;
    }
    return d;
  }
};

Box3 bounding_box(std::span<const Point3> pts);

/// Thrown for degenerate simplices handed to a construction that needs a proper one.
class DegenerateSimplex : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Diametric (smallest) circumball of a triangle in R^3; centre lies in the triangle's plane.
Ball3 circumball_tri3(const Point3& a, const Point3& b, const Point3& c);

Point3 circumcentre_tet(const Point3& a, const Point3& b, const Point3& c, const Point3& d);

/// Circumradius over shortest edge. +inf for degenerate triangles.
real radius_edge(const Point3& a, const Point3& b, const Point3& c);

/// Unnormalised normal (b-a)x(c-a); its length is twice the triangle area.
inline Vec3 triangle_normal(const Point3& a, const Point3& b, const Point3& c) {
  return cross(b - a, c - a);
}

inline real triangle_area(const Point3& a, const Point3& b, const Point3& c) {
  return real(0.5) * norm(triangle_normal(a, b, c));
}

/// Index of the shortest edge; edge i joins vertices i and (i+1)%3.
int shortest_edge(const Point3& a, const Point3& b, const Point3& c);

/// Closest point on triangle abc to p, with barycentric weights of the result.
struct TriangleProjection {
  Point3 point;
  std::array<real, 3> bary{};
};
TriangleProjection closest_point_on_triangle(const Point3& p, const Point3& a, const Point3& b,
                                             const Point3& c);

}  // namespace rdel
