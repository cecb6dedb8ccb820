#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rdel/metrics.hpp"
#include "rdel/refine.hpp"
#include "rdel/shapes.hpp"

using namespace rdel;

namespace {

const real kPi = std::acos(-1.0);

SizeField constant_field(const SurfacePolyhedron& s, real h) {
  return SizeField(s, std::vector<real>(s.vertices().size(), h), 0.2);
}

// Strip of equilateral triangles along x, side 1.
TriMesh equilateral_strip(int n) {
  TriMesh m;
  const real hgt = std::sqrt(3.0) / 2;
  for (int i = 0; i <= n; ++i) {
    m.vertices.push_back({real(i), 0, 0});
    m.vertices.push_back({i + 0.5, hgt, 0});
  }
  for (int i = 0; i < n; ++i) {
    const int a = 2 * i, b = 2 * i + 1, c = 2 * i + 2, d = 2 * i + 3;
    m.triangles.push_back({a, c, b});
    m.triangles.push_back({b, c, d});
  }
  return m;
}

struct SphereComparison {
  SurfacePolyhedron s{shapes::icosphere(3)};
  SizeField field = constant_field(s, 0.07);
  QualityReport dr, fd;
  SphereComparison() {
    RefineConfig cfg;
    cfg.algorithm = Algorithm::DR;
    dr = measure(run(s, field, cfg).surface_mesh(), &s, &field);
    cfg.algorithm = Algorithm::FD;
    fd = measure(run(s, field, cfg).surface_mesh(), &s, &field);
  }
};

const SphereComparison& comparison() {
  static const SphereComparison c;
  return c;
}

}  // namespace

TEST(AreaLength, Examples) {
  EXPECT_NEAR(area_length({0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}), 1.0, 1e-15);
  EXPECT_NEAR(area_length({0, 0, 0}, {1, 0, 0}, {0, 1, 0}), std::sqrt(3.0) / 2, 1e-15);
  EXPECT_LT(area_length({0, 0, 0}, {1, 0, 0}, {0.5, 0.001, 0}), 0.01);
  // Closed form 4*sqrt(3)*A / (l0^2 + l1^2 + l2^2): A = 0.0025, sum = 1.5000500.
  EXPECT_NEAR(area_length({0, 0, 0}, {1, 0, 0}, {0.5, 0.005, 0}), 4 * std::sqrt(3.0) * 0.0025 / 1.50005, 1e-15);
  EXPECT_EQ(area_length({0, 0, 0}, {0, 0, 0}, {1, 0, 0}), 0);
  EXPECT_EQ(area_length({0, 0, 0}, {1, 0, 0}, {2, 0, 0}), 0);
  // Scale and rotation invariant.
  EXPECT_NEAR(area_length({0, 0, 0}, {0, 0, 7}, {0, 7, 0}), std::sqrt(3.0) / 2, 1e-15);
}

TEST(PlaneAngles, Examples) {
  const auto eq = plane_angles({0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0});
  for (real x : eq) EXPECT_NEAR(x, 60, 1e-12);
  const auto rt = plane_angles({0, 0, 0}, {1, 0, 0}, {0, 2, 0});
  EXPECT_NEAR(rt[0], 90, 1e-12);
  EXPECT_NEAR(rt[1], std::atan(2.0) * 180 / kPi, 1e-12);
  const auto deg = plane_angles({0, 0, 0}, {1, 0, 0}, {2, 0, 0});
  EXPECT_EQ(deg[1], 180);
  EXPECT_EQ(deg[0] + deg[2], 0);
  const auto dup = plane_angles({0, 0, 0}, {0, 0, 0}, {2, 0, 0});
  EXPECT_EQ(dup[2], 180);
}

TEST(PlaneAngles, SumTo180OnRandomTriangles) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<real> u(-10, 10);
  real worst = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto a = plane_angles({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)});
    worst = std::max(worst, std::abs(a[0] + a[1] + a[2] - 180));
    for (real x : a) ASSERT_GE(x, 0);
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(MadTheta, PooledAboutTheMean) {
  EXPECT_NEAR(mad_theta(equilateral_strip(10)), 0, 1e-12);
  TriMesh one;
  // 30-60-90 triangle.
  one.vertices = {{0, 0, 0}, {std::sqrt(3.0), 0, 0}, {0, 1, 0}};
  one.triangles = {{0, 1, 2}};
  EXPECT_NEAR(mad_theta(one), 20, 1e-12);
  // Pooled, not per facet: an equilateral plus the 30-60-90 gives
  // deviations {0,0,0,30,0,30} about 60.
  TriMesh two = one;
  two.vertices.push_back({10, 0, 0});
  two.vertices.push_back({11, 0, 0});
  two.vertices.push_back({10.5, std::sqrt(3.0) / 2, 0});
  two.triangles.push_back({3, 4, 5});
  EXPECT_NEAR(mad_theta(two), 10, 1e-12);
  // Translating every angle is impossible for triangles, but rigid motions
  // leave it unchanged.
  TriMesh moved = two;
  for (auto& v : moved.vertices) v = Point3{v.z + 3, v.x - 1, v.y};
  EXPECT_NEAR(mad_theta(moved), mad_theta(two), 1e-12);
}

TEST(RelativeLengths, UniformField) {
  const SurfacePolyhedron plate(shapes::rounded_box({5, 5, 0.5}, 0, 10));
  const SizeField field = constant_field(plate, 2.0);
  TriMesh m;
  m.vertices = {{0, 0, 0.5}, {2, 0, 0.5}, {0, 3, 0.5}};
  m.triangles = {{0, 1, 2}};
  const auto edges = mesh_edges(m);
  ASSERT_EQ(edges.size(), 3u);
  EXPECT_EQ(edges[0], (std::array<std::int32_t, 2>{0, 1}));
  EXPECT_EQ(edges[1], (std::array<std::int32_t, 2>{0, 2}));
  EXPECT_EQ(edges[2], (std::array<std::int32_t, 2>{1, 2}));
  const auto hr = relative_lengths(m, field);
  EXPECT_NEAR(hr[0], 1.0, 1e-12);
  EXPECT_NEAR(hr[1], 1.5, 1e-12);
  EXPECT_NEAR(hr[2], std::sqrt(13.0) / 2, 1e-12);
}

TEST(RelativeLengths, SizeSampledAtMidpoint) {
  const SurfacePolyhedron plate(shapes::rounded_box({5, 5, 0.5}, 0, 10));
  std::vector<real> h(plate.vertices().size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = 1 + 0.1 * (plate.vertices()[i].x + 5);
  const SizeField field(plate, h, 0.2);
  TriMesh m;
  m.vertices = {{-4, 0, 0.5}, {4, 0, 0.5}, {0, 1, 0.5}};
  m.triangles = {{0, 1, 2}};
  EXPECT_NEAR(relative_lengths(m, field)[0], 8 / field.eval(Point3{0, 0, 0.5}), 1e-12);
}

TEST(NormalDeviation, RangeAndFlatRegion) {
  const SurfacePolyhedron plate(shapes::rounded_box({5, 5, 0.5}, 0, 10));
  TriMesh flat;
  flat.vertices = {{0, 0, 0.5}, {1, 0, 0.5}, {0, 1, 0.5}};
  flat.triangles = {{0, 1, 2}, {0, 2, 1}};
  const auto nd = normal_deviation(flat, plate);
  EXPECT_NEAR(nd[0], 0, 1e-12);
  EXPECT_NEAR(nd[1], 0, 1e-12);  // unsigned
  const QualityReport q = measure(flat, &plate, nullptr);
  EXPECT_EQ(q.inverted, 1u);
  EXPECT_GT(q.area_length[0], 0);
  EXPECT_LT(q.area_length[1], 0);

  TriMesh tilted;
  tilted.vertices = {{0, 0, 0.5}, {1, 0, 1.5}, {0, 1, 0.5}};
  tilted.triangles = {{0, 1, 2}};
  EXPECT_NEAR(normal_deviation(tilted, plate)[0], 45, 1e-9);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<real> u(-1, 1);
  TriMesh rnd;
  for (int i = 0; i < 300; ++i) {
    rnd.vertices.push_back({u(rng), u(rng), u(rng)});
    if (i % 3 == 2) rnd.triangles.push_back({i - 2, i - 1, i});
  }
  for (real x : normal_deviation(rnd, plate)) {
    EXPECT_GE(x, 0);
    EXPECT_LE(x, 90);
  }
}

TEST(NormalDeviation, ShrinksWithFinerSphereMeshes) {
  const SurfacePolyhedron s(shapes::icosphere(4));
  real worst[2];
  int i = 0;
  for (real h : {0.3, 0.15}) {
    const SizeField field = constant_field(s, h);
    const RefineRun r = run(s, field, {});
    ASSERT_TRUE(r.stats().converged);
    const auto nd = normal_deviation(r.surface_mesh(), s);
    worst[i++] = *std::max_element(nd.begin(), nd.end());
  }
  EXPECT_LT(worst[1], worst[0]);
}

TEST(Histogram, BinsAndClamping) {
  Histogram h(0, 1, 50);
  h.add(0);
  h.add(1);
  h.add(0.5);
  h.add(-3);
  h.add(7);
  h.add(0.0199);
  EXPECT_EQ(h.total(), 6u);
  EXPECT_EQ(h.counts[0], 3u);
  EXPECT_EQ(h.counts[49], 2u);
  EXPECT_EQ(h.counts[25], 1u);
}

TEST(Summarize, PopulationStats) {
  const ScalarStats s = summarize({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_EQ(s.min, 1);
  EXPECT_EQ(s.max, 4);
  EXPECT_NEAR(s.stddev, std::sqrt(1.25), 1e-15);
  const ScalarStats e = summarize({});
  EXPECT_EQ(e.mean, 0);
}

TEST(Measure, HistogramsReconcileWithCounts) {
  const auto& c = comparison();
  for (const QualityReport* q : {&c.dr, &c.fd}) {
    EXPECT_EQ(q->a_hist.total(), q->facets);
    EXPECT_EQ(q->theta_hist.total(), 3 * q->facets);
    EXPECT_EQ(q->h_r_hist.total(), q->edges);
    EXPECT_EQ(q->h_r.size(), q->edges);
    EXPECT_EQ(q->inverted, 0u);
    EXPECT_LE(q->a_stats.min, q->a_stats.mean);
    EXPECT_LE(q->a_stats.mean, 1);
    EXPECT_GT(q->a_stats.min, 0);
    // Closed sphere: V - E + F = 2.
    EXPECT_EQ(static_cast<long>(q->vertices) - static_cast<long>(q->edges) + static_cast<long>(q->facets), 2);
  }
}

TEST(Measure, RadiusEdgeMatchesGeometryKernel) {
  const TriMesh m = shapes::icosphere(2);
  const QualityReport q = measure(m, nullptr, nullptr);
  for (std::size_t i = 0; i < m.triangles.size(); ++i) {
    const auto& t = m.triangles[i];
    EXPECT_EQ(q.rho[i], radius_edge(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]));
  }
  EXPECT_TRUE(q.normal_dev.empty());
  EXPECT_TRUE(q.h_r.empty());
}

TEST(Measure, FdSphereSizesClusterAboutOne) {
  const auto& c = comparison();
  EXPECT_GE(c.fd.h_r_stats.mean, 0.85);
  EXPECT_LE(c.fd.h_r_stats.mean, 1.15);
}

TEST(Measure, FdNarrowsAngleSpread) {
  const auto& c = comparison();
  EXPECT_LE(c.fd.mad, c.dr.mad / 1.3) << "fd " << c.fd.mad << " dr " << c.dr.mad;
  EXPECT_GT(c.fd.a_stats.mean, c.dr.a_stats.mean);
}

TEST(Measure, EquilateralStripHasNoSpread) {
  const QualityReport q = measure(equilateral_strip(20), nullptr, nullptr);
  EXPECT_NEAR(q.mad, 0, 1e-12);
  EXPECT_NEAR(q.a_stats.mean, 1, 1e-12);
  EXPECT_NEAR(q.theta_min, 60, 1e-12);
  EXPECT_NEAR(q.theta_max, 60, 1e-12);
}

TEST(Report, JsonKeysInStableOrder) {
  const auto& c = comparison();
  const auto j = to_json(c.fd);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"schema", "counts", "area_length", "angles", "radius_edge",
                                            "normal_deviation", "relative_length"}));
  EXPECT_EQ(j["schema"], "quality-v1");
  EXPECT_EQ(j["area_length"]["histogram"]["counts"].size(), 50u);
  EXPECT_EQ(j["angles"]["histogram"]["counts"].size(), 60u);
  EXPECT_EQ(j["relative_length"]["histogram"]["counts"].size(), 50u);
  EXPECT_EQ(j["counts"]["facets"], c.fd.facets);
  EXPECT_EQ(j["angles"]["mad"].get<real>(), c.fd.mad);
  // Same report, same text.
  EXPECT_EQ(j.dump(), to_json(c.fd).dump());
  const auto bare = to_json(measure(equilateral_strip(2), nullptr, nullptr));
  EXPECT_FALSE(bare.contains("normal_deviation"));
  EXPECT_FALSE(bare.contains("relative_length"));
}

TEST(Report, FacetCsv) {
  const QualityReport q = measure(equilateral_strip(3), nullptr, nullptr);
  std::stringstream ss;
  write_facet_csv(ss, q);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "index,a,theta0,theta1,theta2,rho");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  EXPECT_EQ(rows, 6);
}
