#include "rdel/shapes.hpp"

#include <algorithm>
#include <map>
#include <numbers>

namespace rdel::shapes {

TriMesh icosphere(int subdivisions, real radius, Point3 centre) {
  const real t = (1 + std::sqrt(real(5))) / 2;
  std::vector<Point3> v{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p = normalized(p);
  std::vector<Triangle> f{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                          {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                          {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::int32_t, std::int32_t>, std::int32_t> mid;
    auto midpoint_of = [&](std::int32_t a, std::int32_t b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back(normalized(v[a] + v[b]));
      const auto id = static_cast<std::int32_t>(v.size() - 1);
      mid.emplace(key, id);
      return id;
    };
    std::vector<Triangle> g;
    g.reserve(f.size() * 4);
    for (const auto& tr : f) {
      const auto a = midpoint_of(tr[0], tr[1]), b = midpoint_of(tr[1], tr[2]), c = midpoint_of(tr[2], tr[0]);
      g.push_back({tr[0], a, c});
      g.push_back({tr[1], b, a});
      g.push_back({tr[2], c, b});
      g.push_back({a, b, c});
    }
    f = std::move(g);
  }
  for (auto& p : v) p = centre + p * radius;
  return {std::move(v), std::move(f)};
}

TriMesh torus(real R, real r, int nu, int nv) {
  TriMesh m;
  const real tau = 2 * std::numbers::pi;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const real u = tau * i / nu, w = tau * j / nv;
      m.vertices.push_back({(R + r * std::cos(w)) * std::cos(u), (R + r * std::cos(w)) * std::sin(u), r * std::sin(w)});
    }
  auto id = [&](int i, int j) { return static_cast<std::int32_t>(((i + nu) % nu) * nv + (j + nv) % nv); };
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

TriMesh rounded_box(Vec3 h, real rr, int n) {
  const real longest = std::max({h.x, h.y, h.z});
  std::array<int, 3> cells{};
  for (int a = 0; a < 3; ++a) cells[a] = std::max(2, static_cast<int>(std::lround(n * h[a] / longest)));
  TriMesh m;
  std::map<std::array<int, 3>, std::int32_t> index;
  auto vertex = [&](std::array<int, 3> g) {
    auto it = index.find(g);
    if (it != index.end()) return it->second;
    Point3 p;
    for (int a = 0; a < 3; ++a) p[a] = -h[a] + 2 * h[a] * g[a] / cells[a];
    Point3 inner;
    for (int a = 0; a < 3; ++a) inner[a] = std::clamp(p[a], -(h[a] - rr), h[a] - rr);
    const Vec3 off = p - inner;
    if (rr > 0 && norm(off) > 0) p = inner + normalized(off) * rr;
    m.vertices.push_back(p);
    const auto id = static_cast<std::int32_t>(m.vertices.size() - 1);
    index.emplace(g, id);
    return id;
  };
  for (int axis = 0; axis < 3; ++axis)
    for (int side = 0; side < 2; ++side) {
      int ua = (axis + 1) % 3, va = (axis + 2) % 3;
      if (side == 0) std::swap(ua, va);
      for (int i = 0; i < cells[ua]; ++i)
        for (int j = 0; j < cells[va]; ++j) {
          auto at = [&](int di, int dj) {
            std::array<int, 3> g{};
            g[axis] = side ? cells[axis] : 0;
            g[ua] = i + di;
            g[va] = j + dj;
            return vertex(g);
          };
          const auto a = at(0, 0), b = at(1, 0), c = at(1, 1), d = at(0, 1);
          m.triangles.push_back({a, b, c});
          m.triangles.push_back({a, c, d});
        }
    }
  return m;
}

TriMesh merge(const TriMesh& a, const TriMesh& b) {
  TriMesh m = a;
  const auto off = static_cast<std::int32_t>(a.vertices.size());
  m.vertices.insert(m.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (auto t : b.triangles) m.triangles.push_back({t[0] + off, t[1] + off, t[2] + off});
  return m;
}

}  // namespace rdel::shapes
