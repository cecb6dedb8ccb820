#pragma once

// Independent reference implementations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <span>
#include <vector>

#include "rdel/delaunay.hpp"
#include "rdel/geometry.hpp"
#include "rdel/mesh_io.hpp"
#include "rdel/predicates.hpp"

namespace oracle {

using rdel::Point3;
using rdel::real;
using rdel::Vec3;

// Segment/triangle crossings decided with exact orientation signs; the point
// comes from the plane equation.
inline std::vector<Point3> segment_hits(const rdel::TriMesh& m, const Point3& p, const Point3& q) {
  std::vector<Point3> out;
  for (const auto& t : m.triangles) {
    const Point3 &a = m.vertices[t[0]], &b = m.vertices[t[1]], &c = m.vertices[t[2]];
    const int sp = rdel::orient3d(a, b, c, p), sq = rdel::orient3d(a, b, c, q);
    if (sp == sq && sp != 0) continue;
    if (sp == 0 && sq == 0) continue;  // coplanar: not generated by random queries
    const int s1 = rdel::orient3d(p, q, a, b), s2 = rdel::orient3d(p, q, b, c), s3 = rdel::orient3d(p, q, c, a);
    const bool pos = s1 >= 0 && s2 >= 0 && s3 >= 0, neg = s1 <= 0 && s2 <= 0 && s3 <= 0;
    if (!pos && !neg) continue;
    const Vec3 n = cross(b - a, c - a);
    const real s = dot(a - p, n) / dot(q - p, n);
    out.push_back(p + (q - p) * s);
  }
  return out;
}

// Circle hits by dense clipping of every triangle: the plane section of each
// triangle is a segment, intersected with the sphere by bisection on the
// radial distance.
inline std::vector<Point3> circle_hits(const rdel::TriMesh& m, const Vec3& n, const Point3& c, real r) {
  std::vector<Point3> out;
  for (const auto& t : m.triangles) {
    std::array<Point3, 3> v{m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]};
    std::array<real, 3> d{};
    for (int i = 0; i < 3; ++i) d[i] = dot(v[i] - c, n);
    std::vector<Point3> sec;
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3;
      if (d[i] == 0) sec.push_back(v[i]);
      if ((d[i] < 0 && d[j] > 0) || (d[i] > 0 && d[j] < 0)) sec.push_back(v[i] + (v[j] - v[i]) * (d[i] / (d[i] - d[j])));
    }
    if (sec.size() < 2) continue;
    const Point3 a = sec[0], b = sec[1];
    // f(s) = |a + s(b-a) - c| - r is convex in s: split at its minimum.
    auto f = [&](real s) { return norm(a + (b - a) * s - c) - r; };
    real lo = 0, hi = 1;
    for (int k = 0; k < 200; ++k) {
      const real m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      if (f(m1) < f(m2)) hi = m2; else lo = m1;
    }
    const real smin = 0.5 * (lo + hi);
    auto root = [&](real x0, real x1) {
      real f0 = f(x0);
      if ((f0 > 0) == (f(x1) > 0)) return;
      for (int k = 0; k < 200; ++k) {
        const real xm = 0.5 * (x0 + x1);
        if ((f(xm) > 0) == (f0 > 0)) x0 = xm; else x1 = xm;
      }
      out.push_back(a + (b - a) * (0.5 * (x0 + x1)));
    };
    root(0, smin);
    root(smin, 1);
  }
  return out;
}

// Generalised winding number (sum of signed solid angles / 4 pi).
inline real winding_number(const rdel::TriMesh& m, const Point3& p) {
  real w = 0;
  for (const auto& t : m.triangles) {
    const Vec3 a = m.vertices[t[0]] - p, b = m.vertices[t[1]] - p, c = m.vertices[t[2]] - p;
    const real la = norm(a), lb = norm(b), lc = norm(c);
    const real num = dot(a, cross(b, c));
    const real den = la * lb * lc + dot(a, b) * lc + dot(b, c) * la + dot(c, a) * lb;
    w += 2 * std::atan2(num, den);
  }
  return w / (4 * std::numbers::pi);
}

// Closest point over every triangle.
inline real nearest_distance(const rdel::TriMesh& m, const Point3& p) {
  real best = std::numeric_limits<real>::infinity();
  for (const auto& t : m.triangles)
    best = std::min(best, distance(rdel::closest_point_on_triangle(p, m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]).point, p));
  return best;
}

// Merge points closer than tol (greedy, order preserving).
inline std::vector<Point3> dedup(const std::vector<Point3>& pts, real tol) {
  std::vector<Point3> out;
  for (const auto& p : pts)
    if (std::none_of(out.begin(), out.end(), [&](const Point3& q) { return distance(p, q) <= tol; })) out.push_back(p);
  return out;
}

// Set equality of point lists up to tol (each matched exactly once).
inline bool same_point_set(std::vector<Point3> a, std::vector<Point3> b, real tol) {
  if (a.size() != b.size()) return false;
  for (const auto& p : a) {
    auto it = std::find_if(b.begin(), b.end(), [&](const Point3& q) { return distance(p, q) <= tol; });
    if (it == b.end()) return false;
    b.erase(it);
  }
  return true;
}

using Quad = std::array<rdel::VertexId, 4>;

// Tets of the tessellation as sorted tuples of input indices.
inline std::set<Quad> tet_set(const rdel::Tessellation& t, std::span<const rdel::VertexId> to_input) {
  std::set<Quad> out;
  for (rdel::TetId id : t.finite_tets()) {
    Quad q = t.tet(id).v;
    for (auto& v : q) v = to_input[v];
    std::sort(q.begin(), q.end());
    out.insert(q);
  }
  return out;
}

inline std::vector<rdel::VertexId> inverse_ids(const rdel::Tessellation& t) {
  std::vector<rdel::VertexId> inv(t.num_vertices(), -1);
  const auto ids = t.input_vertex_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) inv[ids[i]] = static_cast<rdel::VertexId>(i);
  // vertices inserted after build() keep their own id
  for (std::size_t v = ids.size(); v < inv.size(); ++v) inv[v] = static_cast<rdel::VertexId>(v);
  return inv;
}

// All 4-subsets with an empty open circumsphere (general position input).
inline std::set<Quad> brute_force_delaunay(std::span<const Point3> p) {
  std::set<Quad> out;
  const int n = static_cast<int>(p.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          if (rdel::orient3d(p[a], p[b], p[c], p[d]) == 0) continue;
          bool empty = true;
          for (int e = 0; e < n && empty; ++e) {
            if (e == a || e == b || e == c || e == d) continue;
            empty = rdel::insphere(p[a], p[b], p[c], p[d], p[e]) <= 0;
          }
          if (empty) out.insert({a, b, c, d});
        }
  return out;
}

}  // namespace oracle
