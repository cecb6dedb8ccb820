#include "rdel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace rdel {

namespace {

constexpr real kDeg = 180 / std::numbers::pi;

nlohmann::ordered_json stats_json(const ScalarStats& s) {
  nlohmann::ordered_json j;
  j["mean"] = s.mean;
  j["min"] = s.min;
  j["max"] = s.max;
  j["stddev"] = s.stddev;
  return j;
}

nlohmann::ordered_json hist_json(const Histogram& h) {
  nlohmann::ordered_json j;
  j["lo"] = h.lo;
  j["hi"] = h.hi;
  j["bins"] = h.counts.size();
  j["counts"] = h.counts;
  return j;
}

}  // namespace

real area_length(const Point3& a, const Point3& b, const Point3& c) {
  const real e2 = (distance2(a, b) + distance2(b, c) + distance2(c, a)) / 3;
  if (distance2(a, b) == 0 || distance2(b, c) == 0 || distance2(c, a) == 0) return 0;
  return 4 * std::numbers::sqrt3 / 3 * triangle_area(a, b, c) / e2;
}

std::array<real, 3> plane_angles(const Point3& a, const Point3& b, const Point3& c) {
  const std::array<Point3, 3> p{a, b, c};
  if (a == b || b == c || c == a) return {0, 0, 180};
  std::array<real, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const Vec3 u = p[(i + 1) % 3] - p[i], v = p[(i + 2) % 3] - p[i];
    out[i] = std::atan2(norm(cross(u, v)), dot(u, v)) * kDeg;
  }
  return out;
}

std::vector<std::array<std::int32_t, 2>> mesh_edges(const TriMesh& m) {
  std::vector<std::array<std::int32_t, 2>> e;
  e.reserve(m.triangles.size() * 3);
  for (const auto& t : m.triangles)
    for (int i = 0; i < 3; ++i) {
      const auto a = t[i], b = t[(i + 1) % 3];
      e.push_back({std::min(a, b), std::max(a, b)});
    }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

std::vector<real> relative_lengths(const TriMesh& m, const SizeField& field) {
  return relative_lengths(m, [&field](const Point3& p) { return field.eval(p); });
}

std::vector<real> relative_lengths(const TriMesh& m, const SizeFn& size) {
  std::vector<real> out;
  for (const auto& [a, b] : mesh_edges(m)) {
    const Point3& p = m.vertices[static_cast<std::size_t>(a)];
    const Point3& q = m.vertices[static_cast<std::size_t>(b)];
    out.push_back(distance(p, q) / size(midpoint(p, q)));
  }
  return out;
}

real mad_theta(const TriMesh& m) {
  std::vector<real> all;
  all.reserve(m.triangles.size() * 3);
  for (const auto& t : m.triangles) {
    const auto ang = plane_angles(m.vertices[static_cast<std::size_t>(t[0])], m.vertices[static_cast<std::size_t>(t[1])],
                                  m.vertices[static_cast<std::size_t>(t[2])]);
    all.insert(all.end(), ang.begin(), ang.end());
  }
  if (all.empty()) return 0;
  real mean = 0;
  for (real x : all) mean += x;
  mean /= static_cast<real>(all.size());
  real mad = 0;
  for (real x : all) mad += std::abs(x - mean);
  return mad / static_cast<real>(all.size());
}

std::vector<real> normal_deviation(const TriMesh& m, const SurfacePolyhedron& oracle) {
  std::vector<real> out;
  out.reserve(m.triangles.size());
  for (const auto& t : m.triangles) {
    const Point3& a = m.vertices[static_cast<std::size_t>(t[0])];
    const Point3& b = m.vertices[static_cast<std::size_t>(t[1])];
    const Point3& c = m.vertices[static_cast<std::size_t>(t[2])];
    const Vec3 n = normalized(triangle_normal(a, b, c));
    if (norm2(n) == 0) {
      out.push_back(90);
      continue;
    }
    const SurfaceHit h = oracle.nearest_point((a + b + c) / 3);
    const real d = std::min(real(1), std::abs(dot(n, oracle.normal(h.triangle))));
    out.push_back(std::acos(d) * kDeg);
  }
  return out;
}

void Histogram::add(real x) {
  const auto n = static_cast<long>(counts.size());
  long i = static_cast<long>(std::floor((x - lo) / (hi - lo) * static_cast<real>(n)));
  i = std::clamp(i, 0L, n - 1);
  ++counts[static_cast<std::size_t>(i)];
}

std::size_t Histogram::total() const {
  std::size_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

ScalarStats summarize(const std::vector<real>& v) {
  ScalarStats s;
  if (v.empty()) return s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  for (real x : v) s.mean += x;
  s.mean /= static_cast<real>(v.size());
  real var = 0;
  for (real x : v) var += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(var / static_cast<real>(v.size()));
  return s;
}

QualityReport measure(const TriMesh& m, const SurfacePolyhedron* oracle, const SizeField* field) {
  if (!field) return measure(m, oracle, SizeFn{});
  return measure(m, oracle, [field](const Point3& p) { return field->eval(p); });
}

QualityReport measure(const TriMesh& m, const SurfacePolyhedron* oracle, const SizeFn& size) {
  QualityReport r;
  r.vertices = m.vertices.size();
  r.facets = m.triangles.size();
  r.edges = mesh_edges(m).size();
  r.theta_min = 180;
  r.theta_max = 0;
  for (const auto& t : m.triangles) {
    const Point3& a = m.vertices[static_cast<std::size_t>(t[0])];
    const Point3& b = m.vertices[static_cast<std::size_t>(t[1])];
    const Point3& c = m.vertices[static_cast<std::size_t>(t[2])];
    r.area_length.push_back(area_length(a, b, c));
    r.angles.push_back(plane_angles(a, b, c));
    r.rho.push_back(radius_edge(a, b, c));
    for (real x : r.angles.back()) {
      r.theta_min = std::min(r.theta_min, x);
      r.theta_max = std::max(r.theta_max, x);
      r.theta_hist.add(x);
    }
  }
  if (oracle) {
    r.normal_dev = normal_deviation(m, *oracle);
    for (std::size_t i = 0; i < m.triangles.size(); ++i) {
      const auto& t = m.triangles[i];
      const Point3& a = m.vertices[static_cast<std::size_t>(t[0])];
      const Point3& b = m.vertices[static_cast<std::size_t>(t[1])];
      const Point3& c = m.vertices[static_cast<std::size_t>(t[2])];
      const SurfaceHit h = oracle->nearest_point((a + b + c) / 3);
      if (dot(triangle_normal(a, b, c), oracle->normal(h.triangle)) < 0) {
        r.area_length[i] = -r.area_length[i];
        ++r.inverted;
      }
    }
    r.normal_stats = summarize(r.normal_dev);
  }
  for (real a : r.area_length) r.a_hist.add(a);
  r.a_stats = summarize(r.area_length);
  r.rho_stats = summarize(r.rho);
  r.mad = mad_theta(m);
  if (size) {
    r.h_r = relative_lengths(m, size);
    for (real x : r.h_r) r.h_r_hist.add(x);
    r.h_r_stats = summarize(r.h_r);
  }
  if (m.triangles.empty()) r.theta_min = r.theta_max = 0;
  return r;
}

nlohmann::ordered_json to_json(const QualityReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "quality-v1";
  j["counts"] = {{"vertices", r.vertices}, {"facets", r.facets}, {"edges", r.edges}, {"inverted", r.inverted}};
  auto a = stats_json(r.a_stats);
  a["histogram"] = hist_json(r.a_hist);
  j["area_length"] = a;
  nlohmann::ordered_json ang;
  ang["theta_min"] = r.theta_min;
  ang["theta_max"] = r.theta_max;
  ang["mad"] = r.mad;
  ang["histogram"] = hist_json(r.theta_hist);
  j["angles"] = ang;
  j["radius_edge"] = stats_json(r.rho_stats);
  if (!r.normal_dev.empty()) j["normal_deviation"] = stats_json(r.normal_stats);
  if (!r.h_r.empty()) {
    auto h = stats_json(r.h_r_stats);
    h["histogram"] = hist_json(r.h_r_hist);
    j["relative_length"] = h;
  }
  return j;
}

void write_facet_csv(std::ostream& os, const QualityReport& r) {
  const bool nd = !r.normal_dev.empty();
  os << "index,a,theta0,theta1,theta2,rho" << (nd ? ",normal_dev" : "") << '\n';
  for (std::size_t i = 0; i < r.area_length.size(); ++i) {
    os << i << ',' << format_real(r.area_length[i]);
    for (real x : r.angles[i]) os << ',' << format_real(x);
    os << ',' << format_real(r.rho[i]);
    if (nd) os << ',' << format_real(r.normal_dev[i]);
    os << '\n';
  }
}

}  // namespace rdel
