#include <gtest/gtest.h>

#include <map>
#include <random>

#include "oracles.hpp"
#include "rdel/restricted.hpp"
#include "rdel/shapes.hpp"

using namespace rdel;

namespace {

std::vector<Point3> sphere_points(std::size_t n, real radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<real> g(0, 1);
  std::vector<Point3> pts(n);
  for (auto& p : pts) p = normalized(Vec3{g(rng), g(rng), g(rng)}) * radius;
  return pts;
}

std::vector<Point3> ball_points(std::size_t n, real radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<real> u(-1, 1);
  std::vector<Point3> pts;
  while (pts.size() < n) {
    const Point3 p{u(rng), u(rng), u(rng)};
    if (norm2(p) < 1) pts.push_back(p * radius);
  }
  return pts;
}

// Part of the line cc + t*axis inside the ball |x| <= R, intersected with [t0, t1].
bool clip_to_ball(const VoronoiEdge& e, real R, real& lo, real& hi) {
  const Point3& o = e.diametric.centre;
  const real b = dot(o, e.axis), c = norm2(o) - R * R;
  const real disc = b * b - c;
  if (disc <= 0) return false;
  lo = std::max(std::min(e.t0, e.t1), -b - std::sqrt(disc));
  hi = std::min(std::max(e.t0, e.t1), -b + std::sqrt(disc));
  return lo < hi;
}

real line_distance(const Point3& p, const Point3& o, const Vec3& unit_dir) {
  const Vec3 d = p - o;
  return norm(d - unit_dir * dot(d, unit_dir));
}

}  // namespace

TEST(Restricted, ClassificationMatchesBruteForceSegmentOracle) {
  const TriMesh mesh = shapes::icosphere(3);
  const SurfacePolyhedron s(mesh);
  auto pts = sphere_points(120, 1.0, 11);
  const auto inner = ball_points(60, 0.95, 12);
  pts.insert(pts.end(), inner.begin(), inner.end());
  const Tessellation t = Tessellation::build(pts);

  std::size_t hits = 0, misses = 0;
  for (const FacetRef f : t.finite_facets()) {
    const VoronoiEdge e = t.voronoi_edge(f);
    real lo = 0, hi = 0;
    std::vector<Point3> expect;
    if (clip_to_ball(e, 3.0, lo, hi)) expect = oracle::dedup(oracle::segment_hits(mesh, e.at(lo), e.at(hi)), 1e-9);
    const auto rf = classify_facet(t, s, f);
    ASSERT_EQ(rf.has_value(), !expect.empty());
    if (!rf) {
      ++misses;
      continue;
    }
    ++hits;
    std::vector<Point3> got;
    for (const auto& h : rf->all_hits) got.push_back(h.point);
    EXPECT_TRUE(oracle::same_point_set(got, expect, 1e-9));
    // The chosen ball is the largest over all hits.
    const auto fv = t.facet_vertices(f);
    for (const auto& p : got) {
      const real r = (distance(p, t.vertex(fv[0])) + distance(p, t.vertex(fv[1])) + distance(p, t.vertex(fv[2]))) / 3;
      EXPECT_LE(r, rf->surface_ball.radius * (1 + 1e-12));
    }
  }
  EXPECT_GT(hits, 100u);
  EXPECT_GT(misses, 100u);
}

TEST(Restricted, FlatRegionHasZeroSurfaceError) {
  const TriMesh box = shapes::rounded_box({1, 1, 0.1}, 0, 20);
  const SurfacePolyhedron s(box);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<real> u(-0.9, 0.9);
  std::vector<Point3> pts;
  for (int i = 0; i < 80; ++i) pts.push_back({u(rng), u(rng), 0.1});
  for (int i = 0; i < 80; ++i) pts.push_back({u(rng), u(rng), -0.1});
  for (real x : {-1.0, 1.0})
    for (real y : {-1.0, 1.0})
      for (real z : {-0.1, 0.1}) pts.push_back({x, y, z});
  const Tessellation t = Tessellation::build(pts);
  std::size_t flat = 0;
  for (const FacetRef f : t.finite_facets()) {
    const auto fv = t.facet_vertices(f);
    if (t.vertex(fv[0]).z != 0.1 || t.vertex(fv[1]).z != 0.1 || t.vertex(fv[2]).z != 0.1) continue;
    const auto rf = classify_facet(t, s, f);
    if (!rf || std::abs(rf->surface_ball.centre.z - 0.1) > 1e-12) continue;
    ++flat;
    EXPECT_LT(rf->err_eps, 1e-12);
    EXPECT_NEAR(rf->surface_ball.radius, rf->diametric.radius, 1e-12);
    EXPECT_NEAR(rf->size_h, std::sqrt(3.0) * rf->surface_ball.radius, 1e-15);
  }
  EXPECT_GT(flat, 20u);
}

TEST(Restricted, SphereBallsSitOnDualLine) {
  const SurfacePolyhedron s(shapes::icosphere(4));
  const Tessellation t = Tessellation::build(sphere_points(200, 1.0, 3));
  RestrictedComplex rc(t, s, false);
  rc.rebuild();
  ASSERT_GT(rc.facets().size(), 300u);
  for (const auto& [k, f] : rc.facets()) {
    const Point3& c = f.surface_ball.centre;
    // On the polyhedral sphere: inside the unit sphere, outside the face-inscribed one.
    EXPECT_LE(norm(c), 1 + 1e-12);
    EXPECT_GE(norm(c), 0.995);
    const Vec3 axis = normalized(triangle_normal(t.vertex(k.v[0]), t.vertex(k.v[1]), t.vertex(k.v[2])));
    EXPECT_LT(line_distance(c, f.diametric.centre, axis), 1e-9);
    for (VertexId v : k.v) EXPECT_NEAR(distance(c, t.vertex(v)), f.surface_ball.radius, 1e-9);
    // Right triangle formed by the two centres and any facet vertex.
    EXPECT_NEAR(f.err_eps * f.err_eps, f.surface_ball.radius * f.surface_ball.radius - f.diametric.radius * f.diametric.radius,
                1e-9);
    EXPECT_LE(f.err_eps, f.surface_ball.radius);
    EXPECT_EQ(f.rho, radius_edge(t.vertex(k.v[0]), t.vertex(k.v[1]), t.vertex(k.v[2])));
  }
}

TEST(Restricted, IncrementalUpdateMatchesRebuild) {
  const SurfacePolyhedron s(shapes::icosphere(3));
  Tessellation t = Tessellation::build(sphere_points(40, 1.0, 21));
  RestrictedComplex rc(t, s, true);
  rc.rebuild();
  const auto extra = sphere_points(200, 0.999, 22);
  for (std::size_t i = 0; i < extra.size(); ++i) {
    std::map<FacetKey, std::uint64_t> before;
    for (const auto& [k, f] : rc.facets()) before.emplace(k, f.generation);

    const InsertResult r = t.insert(extra[i]);
    ASSERT_TRUE(r.inserted);
    const ChangeSet cs = rc.update_after_insert(r);
    const std::set<FacetKey> removed(cs.removed.begin(), cs.removed.end());
    const std::set<FacetKey> added(cs.added.begin(), cs.added.end());
    for (const auto& [k, gen] : before) {
      if (removed.contains(k)) continue;
      const RestrictedFacet* f = rc.find(k);
      ASSERT_NE(f, nullptr);
      EXPECT_EQ(f->generation, gen);  // untouched facets keep their identity
    }
    for (const auto& k : removed)
      if (!added.contains(k)) EXPECT_EQ(rc.find(k), nullptr);
    for (const auto& [k, f] : rc.facets()) EXPECT_TRUE(before.contains(k) || added.contains(k));

    if ((i + 1) % 50 == 0) {
      RestrictedComplex fresh(t, s, true);
      fresh.rebuild();
      ASSERT_EQ(fresh.sorted_keys(), rc.sorted_keys());
      for (const auto& [k, f] : fresh.facets()) {
        const RestrictedFacet& g = *rc.find(k);
        EXPECT_EQ(f.surface_ball.centre, g.surface_ball.centre);
        EXPECT_EQ(f.surface_ball.radius, g.surface_ball.radius);
        EXPECT_EQ(f.err_eps, g.err_eps);
      }
      EXPECT_EQ(fresh.volume_tets(), rc.volume_tets());
    }
  }
}

TEST(Restricted, DuplicateInsertChangesNothing) {
  const SurfacePolyhedron s(shapes::icosphere(3));
  Tessellation t = Tessellation::build(sphere_points(60, 1.0, 31));
  RestrictedComplex rc(t, s);
  rc.rebuild();
  const auto keys = rc.sorted_keys();
  const InsertResult r = t.insert(t.vertex(5));
  EXPECT_FALSE(r.inserted);
  const ChangeSet cs = rc.update_after_insert(r);
  EXPECT_TRUE(cs.added.empty());
  EXPECT_TRUE(cs.removed.empty());
  EXPECT_EQ(rc.sorted_keys(), keys);
}

TEST(Restricted, DenseSphereSampleIsManifoldSphere) {
  const TriMesh m = shapes::icosphere(3);
  const SurfacePolyhedron s(m);
  const Tessellation t = Tessellation::build(m.vertices);
  RestrictedComplex rc(t, s, false);
  rc.rebuild();
  const ManifoldReport rep = rc.manifoldness_report();
  EXPECT_TRUE(rep.manifold());
  EXPECT_EQ(rep.euler, 2);
  EXPECT_EQ(rep.components, 1);
  EXPECT_EQ(rep.vertices, m.vertices.size());
}

TEST(Restricted, ManifoldReportCountsNonManifoldEdges) {
  // Sparse sample: a coarse complex whose edge uses are still reported honestly.
  const SurfacePolyhedron s(shapes::icosphere(3));
  const Tessellation t = Tessellation::build(sphere_points(8, 1.0, 41));
  RestrictedComplex rc(t, s, false);
  rc.rebuild();
  const ManifoldReport rep = rc.manifoldness_report();
  std::size_t edges = 0, uses = 0;
  for (const auto& [k, n] : rep.edge_use) {
    edges += n;
    uses += static_cast<std::size_t>(k) * n;
  }
  EXPECT_EQ(edges, rep.edges);
  EXPECT_EQ(uses, 3 * rep.facets);
  EXPECT_EQ(rep.euler, static_cast<long>(rep.vertices) - static_cast<long>(rep.edges) + static_cast<long>(rep.facets));
}

TEST(Restricted, VolumeCellsMatchWindingNumber) {
  const TriMesh mesh = shapes::torus(1, 0.4, 32, 16);
  const SurfacePolyhedron s(mesh);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<real> u(-1.5, 1.5);
  std::vector<Point3> pts;
  for (int i = 0; i < 300; ++i) pts.push_back({u(rng), u(rng), u(rng) * 0.4});
  const Tessellation t = Tessellation::build(pts);
  RestrictedComplex rc(t, s, true);
  rc.rebuild();
  std::size_t inside = 0;
  for (TetId id : t.finite_tets()) {
    Point3 cc;
    try {
      cc = t.circumcentre(id);
    } catch (const DegenerateSimplex&) {
      EXPECT_FALSE(rc.volume_tets().contains(id));
      continue;
    }
    if (oracle::nearest_distance(mesh, cc) < 1e-6) continue;
    const bool in = oracle::winding_number(mesh, cc) > 0.5;
    EXPECT_EQ(rc.volume_tets().contains(id), in) << "tet " << id;
    inside += in;
  }
  EXPECT_GT(inside, 20u);
}
