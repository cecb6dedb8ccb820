#include "rdel/surface.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

namespace rdel {

namespace {

constexpr int kLeafSize = 8;
constexpr real kBaryTol = 1e-12;

std::string edge_name(std::int32_t a, std::int32_t b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

struct UnionFind {
  std::vector<std::int32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Slab test of the line o + t*d against a box, restricted to [t0, t1].
bool line_box(const Box3& b, const Point3& o, const Vec3& inv_d, real t0, real t1) {
  for (int i = 0; i < 3; ++i) {
    real lo = (b.lo[i] - o[i]) * inv_d[i];
    real hi = (b.hi[i] - o[i]) * inv_d[i];
    if (lo > hi) std::swap(lo, hi);
    // NaN (0 * inf) means the line runs inside this slab's boundary plane
    if (std::isnan(lo) || std::isnan(hi)) continue;
    t0 = std::max(t0, lo);
    t1 = std::min(t1, hi);
    if (t0 > t1) return false;
  }
  return true;
}

Box3 padded(Box3 b, real pad) {
  b.lo -= Vec3{pad, pad, pad};
  b.hi += Vec3{pad, pad, pad};
  return b;
}

// Orthonormal basis (u, w) of the plane with unit normal n.
std::pair<Vec3, Vec3> plane_basis(const Vec3& n) {
  const Vec3 seed = std::abs(n.x) < 0.6 ? Vec3{1, 0, 0} : (std::abs(n.y) < 0.6 ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
  const Vec3 u = normalized(cross(n, seed));
  return {u, cross(n, u)};
}

}  // namespace

SurfacePolyhedron SurfacePolyhedron::load(const std::filesystem::path& path) {
  try {
    return SurfacePolyhedron(read_mesh(path));
  } catch (const InputError& e) {
    const std::string what = e.what();
    if (what.find(path.string()) != std::string::npos) throw;
    throw InputError(path.string() + ": " + what);
  }
}

SurfacePolyhedron::SurfacePolyhedron(TriMesh mesh) : mesh_(std::move(mesh)) {
  validate_and_orient();
  build_tree();
}

void SurfacePolyhedron::validate_and_orient() {
  auto& V = mesh_.vertices;
  auto& T = mesh_.triangles;
  if (T.empty()) throw InputError("mesh has no triangles");
  const auto nv = static_cast<std::int32_t>(V.size());
  for (const auto& p : V)
    if (!is_finite(p)) throw InputError("mesh has a non-finite vertex");

  std::vector<char> used(V.size(), 0);
  for (std::size_t f = 0; f < T.size(); ++f) {
    const auto& t = T[f];
    for (auto v : t) {
      if (v < 0 || v >= nv) throw InputError("face " + std::to_string(f) + " references a missing vertex");
      used[v] = 1;
    }
    if (t[0] == t[1] || t[1] == t[2] || t[2] == t[0])
      throw InputError("face " + std::to_string(f) + " repeats a vertex");
    if (!(norm2(triangle_normal(V[t[0]], V[t[1]], V[t[2]])) > 0))
      throw InputError("face " + std::to_string(f) + " has zero area");
  }
  for (std::int32_t v = 0; v < nv; ++v)
    if (!used[v]) throw InputError("vertex " + std::to_string(v) + " is not used by any face");

  // Directed half-edges grouped by undirected key.
  struct Half {
    std::int32_t a, b, face;
    bool forward;  // a -> b is the face's winding direction
  };
  std::vector<Half> halves;
  halves.reserve(T.size() * 3);
  for (std::int32_t f = 0; f < static_cast<std::int32_t>(T.size()); ++f)
    for (int i = 0; i < 3; ++i) {
      const auto u = T[f][i], w = T[f][(i + 1) % 3];
      halves.push_back({std::min(u, w), std::max(u, w), f, u < w});
    }
  std::sort(halves.begin(), halves.end(), [](const Half& x, const Half& y) {
    return std::tie(x.a, x.b, x.face) < std::tie(y.a, y.b, y.face);
  });

  edges_.clear();
  UnionFind uf(T.size());
  for (std::size_t i = 0; i < halves.size();) {
    std::size_t j = i;
    while (j < halves.size() && halves[j].a == halves[i].a && halves[j].b == halves[i].b) ++j;
    const std::size_t k = j - i;
    if (k == 1) throw InputError("open surface: boundary edge " + edge_name(halves[i].a, halves[i].b));
    if (k > 2)
      throw InputError("non-manifold edge " + edge_name(halves[i].a, halves[i].b) + " shared by " +
                       std::to_string(k) + " faces");
    edges_.push_back({halves[i].a, halves[i].b, {halves[i].face, halves[i + 1].face}});
    uf.unite(halves[i].face, halves[i + 1].face);
    i = j;
  }

  // Consistent orientation per component: adjacent faces must traverse the
  // shared edge in opposite directions.
  for (std::size_t i = 0; i < halves.size(); i += 2) {
    if (halves[i].forward == halves[i + 1].forward)
      throw InputError("inconsistent orientation across edge " + edge_name(halves[i].a, halves[i].b));
  }

  // Components labelled in order of their lowest face index.
  tri_component_.assign(T.size(), -1);
  std::vector<std::int32_t> label(T.size(), -1);
  num_components_ = 0;
  for (std::size_t f = 0; f < T.size(); ++f) {
    const auto r = uf.find(static_cast<std::int32_t>(f));
    if (label[r] < 0) label[r] = num_components_++;
    tri_component_[f] = label[r];
  }
  vertex_component_.assign(V.size(), -1);
  for (std::size_t f = 0; f < T.size(); ++f)
    for (auto v : T[f]) vertex_component_[v] = tri_component_[f];

  // Flip components that enclose negative volume.
  std::vector<Point3> ref(num_components_);
  std::vector<int> cnt(num_components_, 0);
  for (std::int32_t v = 0; v < nv; ++v) {
    ref[vertex_component_[v]] += V[v];
    ++cnt[vertex_component_[v]];
  }
  for (int c = 0; c < num_components_; ++c) ref[c] = ref[c] / real(cnt[c]);
  std::vector<real> vol(num_components_, 0);
  for (std::size_t f = 0; f < T.size(); ++f) {
    const Point3& o = ref[tri_component_[f]];
    const auto& t = T[f];
    vol[tri_component_[f]] += dot(V[t[0]] - o, cross(V[t[1]] - o, V[t[2]] - o));
  }
  flipped_ = 0;
  for (int c = 0; c < num_components_; ++c) flipped_ += vol[c] < 0;
  if (flipped_ > 0)
    for (std::size_t f = 0; f < T.size(); ++f)
      if (vol[tri_component_[f]] < 0) std::swap(T[f][1], T[f][2]);

  normals_.resize(T.size());
  vertex_normals_.assign(V.size(), Vec3{});
  for (std::size_t f = 0; f < T.size(); ++f) {
    const auto& t = T[f];
    normals_[f] = normalized(triangle_normal(V[t[0]], V[t[1]], V[t[2]]));
    for (int i = 0; i < 3; ++i) {
      const Vec3 e1 = V[t[(i + 1) % 3]] - V[t[i]];
      const Vec3 e2 = V[t[(i + 2) % 3]] - V[t[i]];
      const real ang = std::atan2(norm(cross(e1, e2)), dot(e1, e2));
      vertex_normals_[t[i]] += normals_[f] * ang;
    }
  }
  for (auto& n : vertex_normals_) n = normalized(n);

  adj_off_.assign(V.size() + 1, 0);
  for (const auto& e : edges_) {
    ++adj_off_[e.a + 1];
    ++adj_off_[e.b + 1];
  }
  std::partial_sum(adj_off_.begin(), adj_off_.end(), adj_off_.begin());
  adj_.assign(adj_off_.back(), 0);
  std::vector<std::int32_t> fill(adj_off_.begin(), adj_off_.end() - 1);
  for (const auto& e : edges_) {
    adj_[fill[e.a]++] = e.b;
    adj_[fill[e.b]++] = e.a;
  }

  bbox_ = bounding_box(V);
  diagonal_ = bbox_.diagonal();
}

void SurfacePolyhedron::build_tree() {
  const auto& V = mesh_.vertices;
  const auto n = static_cast<std::int32_t>(mesh_.triangles.size());
  tri_boxes_.resize(n);
  for (std::int32_t f = 0; f < n; ++f) {
    Box3 b;
    for (auto v : mesh_.triangles[f]) b.add(V[v]);
    tri_boxes_[f] = b;
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.clear();
  nodes_.reserve(2 * static_cast<std::size_t>(n) / kLeafSize + 2);
  build_node(0, n, 0);
}

std::int32_t SurfacePolyhedron::build_node(std::int32_t begin, std::int32_t end, int depth) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Box3 box, cbox;
  for (std::int32_t i = begin; i < end; ++i) {
    box.add(tri_boxes_[order_[i]]);
    cbox.add(tri_boxes_[order_[i]].centre());
  }
  nodes_[id].box = box;
  if (end - begin <= kLeafSize || depth > 60) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  const Vec3 ext = cbox.extent();
  const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
  const std::int32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::int32_t a, std::int32_t b) {
                     const real ca = tri_boxes_[a].centre()[axis], cb = tri_boxes_[b].centre()[axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const auto l = build_node(begin, mid, depth + 1);
  const auto r = build_node(mid, end, depth + 1);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

template <class BoxTest, class Visit>
void SurfacePolyhedron::traverse(BoxTest&& box_test, Visit&& visit) const {
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& nd = nodes_[stack[--top]];
    if (!box_test(nd.box)) continue;
    if (nd.left < 0) {
      for (std::int32_t i = nd.begin; i < nd.end; ++i) visit(order_[i]);
    } else {
      stack[top++] = nd.right;
      stack[top++] = nd.left;
    }
  }
}

std::array<real, 3> SurfacePolyhedron::barycentric(std::int32_t tri, const Point3& p) const {
  const auto& t = mesh_.triangles[tri];
  const Point3& a = mesh_.vertices[t[0]];
  const Point3& b = mesh_.vertices[t[1]];
  const Point3& c = mesh_.vertices[t[2]];
  const Vec3 n = triangle_normal(a, b, c);
  const real d = norm2(n);
  real u = dot(cross(c - b, p - b), n) / d;
  real v = dot(cross(a - c, p - c), n) / d;
  real w = 1 - u - v;
  u = std::max(u, real(0));
  v = std::max(v, real(0));
  w = std::max(w, real(0));
  const real s = u + v + w;
  return {u / s, v / s, w / s};
}

void SurfacePolyhedron::line_hits(const Point3& o, const Vec3& d, real t0, real t1, std::vector<SurfaceHit>& out,
                                  std::vector<std::int32_t>* grazing) const {
  const Vec3 inv{1 / d.x, 1 / d.y, 1 / d.z};
  const real dn = norm(d);
  const real pad = 1e-9 * diagonal_;
  const real tpad = std::isfinite(t1) ? kBaryTol * (t1 - t0) : kBaryTol * diagonal_ / dn;
  const auto& V = mesh_.vertices;
  auto box_test = [&](const Box3& b) { return line_box(padded(b, pad), o, inv, t0 - tpad, t1 + tpad); };
  auto visit = [&](std::int32_t f) {
    const auto& tr = mesh_.triangles[f];
    const Point3& a = V[tr[0]];
    const Vec3 e1 = V[tr[1]] - a, e2 = V[tr[2]] - a;
    const Vec3 pv = cross(d, e2);
    const real det = dot(e1, pv);
    if (std::abs(det) <= 1e-13 * norm(e1) * norm(e2) * dn) {
      // Edge-on: only matters when the line lies in the triangle's plane.
      if (grazing && std::abs(dot(o - a, normals_[f])) <= 1e-12 * diagonal_) grazing->push_back(f);
      return;
    }
    const real id = 1 / det;
    const Vec3 s = o - a;
    const real u = dot(s, pv) * id;
    if (u < -kBaryTol || u > 1 + kBaryTol) return;
    const Vec3 q = cross(s, e1);
    const real v = dot(d, q) * id;
    if (v < -kBaryTol || u + v > 1 + kBaryTol) return;
    const real t = dot(e2, q) * id;
    if (t < t0 - tpad || t > t1 + tpad) return;
    SurfaceHit h;
    const real bu = std::clamp(u, real(0), real(1)), bv = std::clamp(v, real(0), real(1));
    const real bs = std::max(bu + bv, real(1));
    h.bary = {1 - (bu + bv) / bs, bu / bs, bv / bs};
    h.point = V[tr[0]] * h.bary[0] + V[tr[1]] * h.bary[1] + V[tr[2]] * h.bary[2];
    h.triangle = f;
    h.t = std::clamp(t, t0, t1);
    out.push_back(h);
  };
  traverse(box_test, visit);
}

std::vector<SurfaceHit> SurfacePolyhedron::line_query(const Point3& o, const Vec3& d, real t0, real t1) const {
  std::vector<SurfaceHit> hits;
  std::vector<std::int32_t> grazing;
  line_hits(o, d, t0, t1, hits, &grazing);
  // Grazing: nudge the query off the triangle's plane and retry.
  Point3 oo = o;
  for (int retry = 0; retry < 3 && !grazing.empty(); ++retry) {
    const real s = 1e-12 * diagonal_ * (retry + 1);
    const Vec3 nudge = normalized(Vec3{0.5772156649 + retry, 1.4142135623, 0.3183098861 * (retry + 1)}) * s;
    oo = o + nudge;
    hits.clear();
    grazing.clear();
    line_hits(oo, d, t0, t1, hits, &grazing);
  }
  if (!grazing.empty()) {
    // Still edge-on: report the first point where the line enters each such
    // triangle as a single tangency hit.
    const auto& V = mesh_.vertices;
    for (auto f : grazing) {
      const auto& tr = mesh_.triangles[f];
      real lo = t0, hi = std::isfinite(t1) ? t1 : t0 + 4 * diagonal_ / norm(d);
      bool empty = false;
      for (int i = 0; i < 3 && !empty; ++i) {
        const Point3& p = V[tr[i]];
        const Vec3 m = cross(normals_[f], V[tr[(i + 1) % 3]] - p);
        const real c0 = dot(oo - p, m), c1 = dot(d, m);
        if (c1 == 0) {
          empty = c0 < 0;
          continue;
        }
        const real tc = -c0 / c1;
        if (c1 > 0)
          lo = std::max(lo, tc);
        else
          hi = std::min(hi, tc);
        empty = lo > hi;
      }
      if (empty) continue;
      SurfaceHit h;
      h.t = lo;
      h.triangle = f;
      h.bary = barycentric(f, oo + d * lo);
      h.point = V[tr[0]] * h.bary[0] + V[tr[1]] * h.bary[1] + V[tr[2]] * h.bary[2];
      hits.push_back(h);
    }
  }
  std::sort(hits.begin(), hits.end(), [](const SurfaceHit& a, const SurfaceHit& b) {
    return a.t < b.t || (a.t == b.t && a.triangle < b.triangle);
  });
  const real tol = dedup_tolerance();
  std::vector<SurfaceHit> out;
  out.reserve(hits.size());
  for (const auto& h : hits) {
    bool dup = false;
    for (auto it = out.rbegin(); it != out.rend() && !dup; ++it) dup = distance(it->point, h.point) <= tol;
    if (!dup) out.push_back(h);
  }
  return out;
}

std::vector<SurfaceHit> SurfacePolyhedron::intersect_segment(const Point3& a, const Point3& b) const {
  return line_query(a, b - a, 0, 1);
}

std::vector<SurfaceHit> SurfacePolyhedron::intersect_ray(const Point3& origin, const Vec3& dir) const {
  return line_query(origin, dir, 0, std::numeric_limits<real>::infinity());
}

void SurfacePolyhedron::circle_hits_triangle(std::int32_t f, const Plane3& plane, const Point3& centre, real radius,
                                             std::vector<SurfaceHit>& out) const {
  const auto& tr = mesh_.triangles[f];
  const auto& V = mesh_.vertices;
  std::array<real, 3> sd{};
  std::array<int, 3> sg{};
  for (int i = 0; i < 3; ++i) {
    sd[i] = plane.signed_distance(V[tr[i]]);
    sg[i] = (sd[i] > 0) - (sd[i] < 0);
  }
  if (sg[0] == sg[1] && sg[1] == sg[2] && sg[0] != 0) return;

  auto emit = [&](const Point3& p) {
    SurfaceHit h;
    h.triangle = f;
    h.bary = barycentric(f, p);
    h.point = p;
    out.push_back(h);
  };
  // Roots of |p + s(q - p) - centre| = radius for s in [0, 1].
  auto segment_sphere = [&](const Point3& p, const Point3& q) {
    const Vec3 d = q - p, m = p - centre;
    const real A = norm2(d);
    if (!(A > 0)) {
      if (std::abs(distance(p, centre) - radius) <= 1e-12 * radius) emit(p);
      return;
    }
    const real B = dot(m, d), C = norm2(m) - radius * radius;
    const real disc = B * B - A * C;
    if (disc < 0) return;
    const real sq = std::sqrt(disc);
    // stable pair of roots
    const real qq = B >= 0 ? -(B + sq) : -(B - sq);
    std::array<real, 2> roots{qq / A, qq != 0 ? C / qq : -B / A};
    if (roots[0] > roots[1]) std::swap(roots[0], roots[1]);
    const real slack = 1e-12;
    for (int k = 0; k < 2; ++k) {
      if (k == 1 && roots[1] == roots[0]) break;
      const real s = roots[k];
      if (s < -slack || s > 1 + slack) continue;
      emit(p + d * std::clamp(s, real(0), real(1)));
    }
  };

  if (sg[0] == 0 && sg[1] == 0 && sg[2] == 0) {
    for (int i = 0; i < 3; ++i) segment_sphere(V[tr[i]], V[tr[(i + 1) % 3]]);
    return;
  }
  // Clip the triangle to the plane: vertices on it and sign-changing edges.
  std::array<Point3, 3> pts;
  int np = 0;
  for (int i = 0; i < 3; ++i) {
    if (sg[i] == 0) pts[np++] = V[tr[i]];
    const int j = (i + 1) % 3;
    if (sg[i] * sg[j] < 0) {
      const real s = sd[i] / (sd[i] - sd[j]);
      pts[np++] = V[tr[i]] + (V[tr[j]] - V[tr[i]]) * s;
    }
  }
  if (np == 1) {
    segment_sphere(pts[0], pts[0]);
  } else if (np >= 2) {
    segment_sphere(pts[0], pts[1]);
  }
}

std::vector<SurfaceHit> SurfacePolyhedron::intersect_circle(const Plane3& plane, const Point3& centre,
                                                            real radius) const {
  std::vector<SurfaceHit> hits;
  if (!(radius > 0)) return hits;
  const real r2 = radius * radius * (1 + 1e-9);
  const real pad = 1e-9 * diagonal_;
  auto box_test = [&](const Box3& b) {
    const Box3 pb = padded(b, pad);
    if (pb.distance2(centre) > r2) return false;
    // plane must cross the box
    real lo = 0, hi = 0;
    for (int i = 0; i < 3; ++i) {
      const real e = 0.5 * (pb.hi[i] - pb.lo[i]);
      lo += std::abs(plane.normal[i]) * e;
    }
    hi = plane.signed_distance(pb.centre());
    return std::abs(hi) <= lo;
  };
  traverse(box_test, [&](std::int32_t f) { circle_hits_triangle(f, plane, centre, radius, hits); });

  const auto [u, w] = plane_basis(plane.normal);
  for (auto& h : hits) h.t = std::atan2(dot(h.point - centre, w), dot(h.point - centre, u));
  std::sort(hits.begin(), hits.end(), [](const SurfaceHit& a, const SurfaceHit& b) {
    return a.t < b.t || (a.t == b.t && a.triangle < b.triangle);
  });
  const real tol = dedup_tolerance();
  std::vector<SurfaceHit> out;
  for (const auto& h : hits) {
    bool dup = false;
    for (const auto& k : out) dup = dup || distance(k.point, h.point) <= tol;
    if (!dup) out.push_back(h);
  }
  return out;
}

bool SurfacePolyhedron::near_surface(const Point3& p, real tol) const {
  const real tol2 = tol * tol;
  bool found = false;
  const auto& V = mesh_.vertices;
  traverse([&](const Box3& b) { return !found && b.distance2(p) <= tol2; },
           [&](std::int32_t f) {
             if (found) return;
             const auto& t = mesh_.triangles[f];
             found = distance2(closest_point_on_triangle(p, V[t[0]], V[t[1]], V[t[2]]).point, p) <= tol2;
           });
  return found;
}

bool SurfacePolyhedron::contains(const Point3& p) const {
  if (near_surface(p, 1e-10 * diagonal_)) return true;
  if (bbox_.distance2(p) > 0) return false;

  // Ray parity; a crossing too close to a triangle edge or an edge-on
  // triangle makes the count unreliable, so a fresh direction is drawn.
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<real> g(0, 1);
  const auto& V = mesh_.vertices;
  const real len = 2 * diagonal_;
  int parity = 0;
  for (int attempt = 0; attempt < 16; ++attempt) {
    const Vec3 d = normalized(Vec3{g(rng), g(rng), g(rng)}) * len;
    const Vec3 inv{1 / d.x, 1 / d.y, 1 / d.z};
    int count = 0;
    bool unsafe = false;
    traverse([&](const Box3& b) { return !unsafe && line_box(b, p, inv, 0, 1); },
             [&](std::int32_t f) {
               if (unsafe) return;
               const auto& tr = mesh_.triangles[f];
               const Point3& a = V[tr[0]];
               const Vec3 e1 = V[tr[1]] - a, e2 = V[tr[2]] - a;
               const Vec3 pv = cross(d, e2);
               const real det = dot(e1, pv);
               if (std::abs(det) <= 1e-10 * norm(e1) * norm(e2) * len) {
                 if (std::abs(dot(p - a, normals_[f])) <= 1e-9 * diagonal_) unsafe = true;
                 return;
               }
               const real id = 1 / det;
               const Vec3 s = p - a;
               const real u = dot(s, pv) * id;
               const Vec3 q = cross(s, e1);
               const real v = dot(d, q) * id;
               const real t = dot(e2, q) * id;
               constexpr real m = 1e-9;
               if (u < -m || v < -m || u + v > 1 + m || t < 0 || t > 1) return;
               if (u < m || v < m || u + v > 1 - m) {
                 unsafe = true;
                 return;
               }
               ++count;
             });
    parity = count & 1;
    if (!unsafe) return parity == 1;
  }
  return parity == 1;
}

SurfaceHit SurfacePolyhedron::nearest_point(const Point3& p) const {
  const auto& V = mesh_.vertices;
  SurfaceHit best;
  real best2 = std::numeric_limits<real>::infinity();
  // Descend nearer child first so pruning bites early.
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& nd = nodes_[stack[--top]];
    if (nd.box.distance2(p) > best2) continue;
    if (nd.left < 0) {
      for (std::int32_t i = nd.begin; i < nd.end; ++i) {
        const auto f = order_[i];
        const auto& t = mesh_.triangles[f];
        const auto pr = closest_point_on_triangle(p, V[t[0]], V[t[1]], V[t[2]]);
        const real d2 = distance2(pr.point, p);
        if (d2 < best2 || (d2 == best2 && f < best.triangle)) {
          best2 = d2;
          best.point = pr.point;
          best.bary = pr.bary;
          best.triangle = f;
        }
      }
    } else {
      const real dl = nodes_[nd.left].box.distance2(p), dr = nodes_[nd.right].box.distance2(p);
      if (dl <= dr) {
        stack[top++] = nd.right;
        stack[top++] = nd.left;
      } else {
        stack[top++] = nd.left;
        stack[top++] = nd.right;
      }
    }
  }
  best.t = std::sqrt(best2);
  return best;
}

}  // namespace rdel
