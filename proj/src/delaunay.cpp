#include "rdel/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "rdel/predicates.hpp"

namespace rdel {

FacetKey FacetKey::of(VertexId a, VertexId b, VertexId c) {
  FacetKey k{{a, b, c}};
  std::sort(k.v.begin(), k.v.end());
  return k;
}

namespace {

// |det| / (|ab| |ac| |ad|) below which the double circumcentre is recomputed
// exactly; above it the relative error stays near 1e-8.
constexpr real kCircumcentreCond = 1e-8;

// Moves the infinite vertex of a ghost into slot 3 with an even permutation.
void normalise_ghost(std::array<VertexId, 4>& v) {
  int k = 0;
  while (k < 4 && v[k] != kInfinite) ++k;
  if (k == 4 || k == 3) return;
  std::swap(v[k], v[3]);
  // second transposition among the two remaining finite slots keeps parity
  int a = -1, b = -1;
  for (int i = 0; i < 3; ++i) {
    if (i == k) continue;
    (a < 0 ? a : b) = i;
  }
  std::swap(v[a], v[b]);
}

// Links every face of the given cells by matching sorted vertex triples.
void link_faces(std::vector<Tet>& tets, std::span<const TetId> ids) {
  std::map<std::array<VertexId, 3>, std::pair<TetId, int>> open;
  for (TetId t : ids) {
    for (int i = 0; i < 4; ++i) {
      std::array<VertexId, 3> f{};
      int k = 0;
      for (int j = 0; j < 4; ++j)
        if (j != i) f[k++] = tets[t].v[j];
      std::sort(f.begin(), f.end());
      auto it = open.find(f);
      if (it == open.end()) {
        open.emplace(f, std::make_pair(t, i));
      } else {
        tets[t].n[i] = it->second.first;
        tets[it->second.first].n[it->second.second] = t;
        open.erase(it);
      }
    }
  }
}

constexpr real kDupRelTol = 1e-12;

}  // namespace

TetId Tessellation::new_tet() {
  TetId t;
  if (!free_.empty()) {
    t = free_.back();
    free_.pop_back();
  } else {
    t = static_cast<TetId>(tets_.size());
    tets_.emplace_back();
    mark_.push_back(0);
  }
  tets_[t] = Tet{};
  tets_[t].alive = true;
  ++live_count_;
  return t;
}

void Tessellation::free_tet(TetId t) {
  if (!tets_[t].ghost()) --finite_count_;
  --live_count_;
  tets_[t].alive = false;
  free_.push_back(t);
}

Tessellation Tessellation::build(std::span<const Point3> points) {
  if (points.size() < 4) throw std::invalid_argument("delaunay: need at least 4 points");
  for (const auto& p : points)
    if (!is_finite(p)) throw std::invalid_argument("delaunay: non-finite input point");

  Tessellation tess;
  const Box3 box = bounding_box(points);
  tess.dup_tol_ = kDupRelTol * box.diagonal();

  // Seed simplex: earliest points that span R^3.
  const std::size_t n = points.size();
  std::size_t i0 = 0, i1 = n, i2 = n, i3 = n;
  for (std::size_t i = 1; i < n && i1 == n; ++i)
    if (distance(points[i], points[i0]) > tess.dup_tol_) i1 = i;
  if (i1 == n) throw std::invalid_argument("delaunay: all points coincide");
  const real s = std::max(box.diagonal(), real(1));
  const std::array<Point3, 3> probes{points[i0] + Vec3{s, 0, 0}, points[i0] + Vec3{0, s, 0},
                                     points[i0] + Vec3{0, 0, s}};
  for (std::size_t i = i1 + 1; i < n && i2 == n; ++i) {
    for (const auto& q : probes) {
      if (orient3d(points[i0], points[i1], points[i], q) != 0) {
        i2 = i;
        break;
      }
    }
  }
  if (i2 == n) throw std::invalid_argument("delaunay: all points collinear");
  for (std::size_t i = i2 + 1; i < n && i3 == n; ++i)
    if (orient3d(points[i0], points[i1], points[i2], points[i]) != 0) i3 = i;
  if (i3 == n) throw std::invalid_argument("delaunay: all points coplanar");

  tess.points_ = {points[i0], points[i1], points[i2], points[i3]};
  tess.input_ids_.assign(n, kInfinite);
  tess.input_ids_[i0] = 0;
  tess.input_ids_[i1] = 1;
  tess.input_ids_[i2] = 2;
  tess.input_ids_[i3] = 3;
  std::array<VertexId, 4> v{0, 1, 2, 3};
  if (orient3d(tess.points_[0], tess.points_[1], tess.points_[2], tess.points_[3]) < 0)
    std::swap(v[0], v[1]);

  std::vector<TetId> ids;
  const TetId t0 = tess.new_tet();
  tess.tets_[t0].v = v;
  ++tess.finite_count_;
  ids.push_back(t0);
  for (int i = 0; i < 4; ++i) {
    std::array<VertexId, 4> g = v;
    g[i] = kInfinite;
    // the infinite vertex lies across face i, opposite to v[i]
    const int a = (i + 1) % 4, b = (i + 2) % 4;
    std::swap(g[a], g[b]);
    normalise_ghost(g);
    const TetId t = tess.new_tet();
    tess.tets_[t].v = g;
    ids.push_back(t);
  }
  link_faces(tess.tets_, ids);
  tess.hint_ = t0;

  for (std::size_t i = 0; i < n; ++i) {
    if (i == i0 || i == i1 || i == i2 || i == i3) continue;
    const InsertResult r = tess.insert(points[i]);
    if (!r.inserted) ++tess.duplicates_;
    tess.input_ids_[i] = r.vertex;
  }
  return tess;
}

TetId Tessellation::locate(const Point3& p) const {
  TetId t = hint_;
  if (t < 0 || t >= static_cast<TetId>(tets_.size()) || !tets_[t].alive) {
    t = 0;
    while (!tets_[t].alive) ++t;
  }
  if (tets_[t].ghost()) t = tets_[t].n[3];

  const std::size_t cap = 4 * tets_.size() + 64;
  for (std::size_t step = 0; step < cap; ++step) {
    const Tet& c = tets_[t];
    if (c.ghost()) return t;
    bool moved = false;
    const std::uint32_t rot = walk_rot_++;
    for (int k = 0; k < 4; ++k) {
      const int i = static_cast<int>((k + rot) % 4);
      std::array<const Point3*, 4> q{};
      for (int j = 0; j < 4; ++j) q[j] = j == i ? &p : &points_[c.v[j]];
      if (orient3d(*q[0], *q[1], *q[2], *q[3]) < 0) {
        t = c.n[i];
        moved = true;
        break;
      }
    }
    if (!moved) return t;
  }

  // Walk failed to settle; fall back to a scan (never observed in practice).
  for (TetId u = 0; u < static_cast<TetId>(tets_.size()); ++u) {
    const Tet& c = tets_[u];
    if (!c.alive) continue;
    if (c.ghost()) {
      if (orient3d(points_[c.v[0]], points_[c.v[1]], points_[c.v[2]], p) > 0) return u;
      continue;
    }
    bool inside = true;
    for (int i = 0; i < 4 && inside; ++i) {
      std::array<const Point3*, 4> q{};
      for (int j = 0; j < 4; ++j) q[j] = j == i ? &p : &points_[c.v[j]];
      inside = orient3d(*q[0], *q[1], *q[2], *q[3]) >= 0;
    }
    if (inside) return u;
  }
  throw std::logic_error("delaunay: point location failed");
}

bool Tessellation::in_conflict(TetId t, const Point3& p, VertexId pid) const {
  const Tet& c = tets_[t];
  if (c.ghost()) {
    const int o = orient3d(points_[c.v[0]], points_[c.v[1]], points_[c.v[2]], p);
    if (o != 0) return o > 0;
    // On the hull plane: conflict iff inside the hull face's circumcircle,
    // i.e. iff the finite cell across the face is in conflict.
    return in_conflict(c.n[3], p, pid);
  }
  const std::array<const Point3*, 5> pts{&points_[c.v[0]], &points_[c.v[1]], &points_[c.v[2]],
                                         &points_[c.v[3]], &p};
  const std::array<std::int64_t, 5> ids{c.v[0], c.v[1], c.v[2], c.v[3], pid};
  return insphere_perturbed(pts, ids) > 0;
}

void Tessellation::conflict_region(const Point3& p, VertexId pid, std::vector<TetId>& cavity,
                                   std::vector<FacetRef>& boundary) const {
  cavity.clear();
  boundary.clear();
  const TetId start = locate(p);
  hint_ = start;
  if (!in_conflict(start, p, pid)) return;

  // mark_ == stamp_ means in the cavity, stamp_ + 1 means tested and rejected
  stamp_ += 2;
  if (stamp_ < 2) {
    std::fill(mark_.begin(), mark_.end(), 0u);
    stamp_ = 2;
  }
  const std::uint32_t in = stamp_, out = stamp_ + 1;
  cavity.push_back(start);
  mark_[start] = in;
  for (std::size_t k = 0; k < cavity.size(); ++k) {
    const TetId t = cavity[k];
    for (int i = 0; i < 4; ++i) {
      const TetId u = tets_[t].n[i];
      if (mark_[u] == in) continue;
      if (mark_[u] == out || !in_conflict(u, p, pid)) {
        mark_[u] = out;
        boundary.push_back({t, i});
        continue;
      }
      mark_[u] = in;
      cavity.push_back(u);
    }
  }
}

InsertResult Tessellation::probe(const Point3& p) const {
  InsertResult r;
  std::vector<TetId> cavity;
  std::vector<FacetRef> boundary;
  const VertexId pid = static_cast<VertexId>(points_.size());
  conflict_region(p, pid, cavity, boundary);
  real best = std::numeric_limits<real>::infinity();
  VertexId best_v = kInfinite;
  auto consider = [&](VertexId v) {
    if (v == kInfinite) return;
    const real d = distance(points_[v], p);
    if (d < best || (d == best && v < best_v)) {
      best = d;
      best_v = v;
    }
  };
  if (cavity.empty()) {
    // p sits on a vertex of the located cell (only exact duplicates get here)
    for (VertexId v : tets_[hint_].v) consider(v);
  } else {
    for (TetId t : cavity)
      for (VertexId v : tets_[t].v) consider(v);
  }
  r.nearest_distance = best;
  r.nearest_vertex = best_v;
  r.vertex = best_v;
  r.destroyed = cavity;
  return r;
}

InsertResult Tessellation::insert(const Point3& p) {
  if (!is_finite(p)) throw std::invalid_argument("delaunay: non-finite point");
  InsertResult r;
  std::vector<TetId> cavity;
  std::vector<FacetRef> boundary;
  const VertexId pid = static_cast<VertexId>(points_.size());
  conflict_region(p, pid, cavity, boundary);

  real best = std::numeric_limits<real>::infinity();
  VertexId best_v = kInfinite;
  auto consider = [&](VertexId v) {
    if (v == kInfinite) return;
    const real d = distance(points_[v], p);
    if (d < best || (d == best && v < best_v)) {
      best = d;
      best_v = v;
    }
  };
  if (cavity.empty()) {
    for (VertexId v : tets_[hint_].v) consider(v);
  } else {
    for (TetId t : cavity)
      for (VertexId v : tets_[t].v) consider(v);
  }
  r.nearest_distance = best;
  r.nearest_vertex = best_v;
  if (cavity.empty() || best <= dup_tol_) {
    r.inserted = false;
    r.vertex = best_v;
    return r;
  }

  points_.push_back(p);
  r.inserted = true;
  r.vertex = pid;
  r.destroyed = cavity;
  r.destroyed_vertices.reserve(cavity.size());
  for (TetId t : cavity) r.destroyed_vertices.push_back(tets_[t].v);

  struct OpenFace {
    EdgeKey edge;
    TetId tet;
    int slot;
  };
  std::vector<OpenFace> open;
  open.reserve(boundary.size() * 3);
  r.created.reserve(boundary.size());

  for (const FacetRef& f : boundary) {
    const Tet old = tets_[f.tet];
    const TetId outer = old.n[f.face];
    const TetId nt = new_tet();
    Tet& c = tets_[nt];
    c.v = old.v;
    c.v[f.face] = pid;
    c.n[f.face] = outer;
    if (!c.ghost()) ++finite_count_;
    Tet& o = tets_[outer];
    for (int k = 0; k < 4; ++k)
      if (o.n[k] == f.tet) o.n[k] = nt;
    for (int j = 0; j < 4; ++j) {
      if (j == f.face) continue;
      std::array<VertexId, 2> e{};
      int m = 0;
      for (int k = 0; k < 4; ++k)
        if (k != j && k != f.face) e[m++] = tets_[nt].v[k];
      open.push_back({EdgeKey::of(e[0], e[1]), nt, j});
    }
    r.created.push_back(nt);
  }

  std::sort(open.begin(), open.end(), [](const OpenFace& a, const OpenFace& b) { return a.edge < b.edge; });
  for (std::size_t k = 0; k + 1 < open.size(); k += 2) {
    const OpenFace& a = open[k];
    const OpenFace& b = open[k + 1];
    if (!(a.edge == b.edge)) throw std::logic_error("delaunay: cavity boundary is not a closed surface");
    tets_[a.tet].n[a.slot] = b.tet;
    tets_[b.tet].n[b.slot] = a.tet;
  }

  for (TetId t : cavity) free_tet(t);
  hint_ = r.created.front();
  for (TetId t : r.created)
    if (!tets_[t].ghost()) {
      hint_ = t;
      break;
    }
  return r;
}

std::vector<TetId> Tessellation::finite_tets() const {
  std::vector<TetId> out;
  out.reserve(finite_count_);
  for (TetId t = 0; t < static_cast<TetId>(tets_.size()); ++t)
    if (tets_[t].alive && !tets_[t].ghost()) out.push_back(t);
  return out;
}

std::vector<FacetRef> Tessellation::finite_facets() const {
  std::vector<FacetRef> out;
  for (TetId t = 0; t < static_cast<TetId>(tets_.size()); ++t) {
    const Tet& c = tets_[t];
    if (!c.alive || c.ghost()) continue;
    for (int i = 0; i < 4; ++i) {
      const TetId u = c.n[i];
      if (tets_[u].ghost() || t < u) out.push_back({t, i});
    }
  }
  return out;
}

std::array<VertexId, 3> Tessellation::facet_vertices(FacetRef f) const {
  const Tet& c = tets_[f.tet];
  std::array<VertexId, 3> out{};
  int k = 0;
  for (int j = 0; j < 4; ++j)
    if (j != f.face) out[k++] = c.v[j];
  return out;
}

FacetRef Tessellation::mirror(FacetRef f) const {
  const TetId u = tets_[f.tet].n[f.face];
  for (int k = 0; k < 4; ++k)
    if (tets_[u].n[k] == f.tet) return {u, k};
  throw std::logic_error("delaunay: broken adjacency");
}

namespace {

// Position along the facet axis of the circumcentre of (facet, apex).
real axis_parameter(const Point3& a, const Ball3& ball, const Vec3& axis, const Point3& apex, int side) {
  const real num = dot(apex - a, apex + a - 2 * ball.centre);
  real den = 2 * dot(apex - ball.centre, axis);
  if (den == 0 || (den > 0) != (side > 0)) den = side > 0 ? 1e-300 : -1e-300;
  const real t = num / den;
  if (!std::isfinite(t)) return std::copysign(std::numeric_limits<real>::infinity(), t);
  return t;
}

}  // namespace

VoronoiEdge Tessellation::voronoi_edge(FacetRef f) const {
  if (tets_[f.tet].ghost()) f = mirror(f);
  const Tet& c = tets_[f.tet];
  VoronoiEdge e;
  e.facet = f;
  e.vertices = facet_vertices(f);
  const Point3& a = points_[e.vertices[0]];
  const Point3& b = points_[e.vertices[1]];
  const Point3& cc = points_[e.vertices[2]];
  e.diametric = circumball_tri3(a, b, cc);
  e.axis = normalized(triangle_normal(a, b, cc));

  const Point3& apex = points_[c.v[f.face]];
  const int side = orient3d(a, b, cc, apex);
  e.t0 = axis_parameter(a, e.diametric, e.axis, apex, side);

  const FacetRef m = mirror(f);
  const Tet& o = tets_[m.tet];
  if (o.ghost()) {
    e.ray = true;
    e.t1 = side > 0 ? -std::numeric_limits<real>::infinity() : std::numeric_limits<real>::infinity();
  } else {
    const Point3& apex2 = points_[o.v[m.face]];
    e.t1 = axis_parameter(a, e.diametric, e.axis, apex2, -side);
  }
  return e;
}

Point3 Tessellation::circumcentre(TetId t) const {
  const Tet& c = tets_[t];
  const Point3& a = points_[c.v[0]];
  const Vec3 ab = points_[c.v[1]] - a, ac = points_[c.v[2]] - a, ad = points_[c.v[3]] - a;
  const real det = dot(ab, cross(ac, ad));
  const Vec3 num = cross(ac, ad) * norm2(ab) + cross(ad, ab) * norm2(ac) + cross(ab, ac) * norm2(ad);
  const Point3 cc = a + num / (2 * det);
  // Near-flat cells (e.g. four points on one circle of a regular grid) lose
  // all accuracy in double; their centres would be arbitrary points.
  if (is_finite(cc) && std::abs(det) > kCircumcentreCond * norm(ab) * norm(ac) * norm(ad)) return cc;
  return circumcentre_exact(a, points_[c.v[1]], points_[c.v[2]], points_[c.v[3]]);
}

std::string Tessellation::check_structure() const {
  std::ostringstream err;
  for (TetId t = 0; t < static_cast<TetId>(tets_.size()); ++t) {
    const Tet& c = tets_[t];
    if (!c.alive) continue;
    for (int i = 0; i < 4; ++i) {
      const TetId u = c.n[i];
      if (u < 0 || !tets_[u].alive) {
        err << "tet " << t << " face " << i << " has dead neighbour";
        return err.str();
      }
      int back = 0;
      for (int k = 0; k < 4; ++k) back += tets_[u].n[k] == t;
      if (back != 1) {
        err << "tet " << t << " neighbour " << u << " lacks a unique back pointer";
        return err.str();
      }
      auto fa = facet_vertices({t, i});
      auto fb = facet_vertices(mirror({t, i}));
      std::sort(fa.begin(), fa.end());
      std::sort(fb.begin(), fb.end());
      if (fa != fb) {
        err << "tet " << t << " face " << i << " does not match its mirror";
        return err.str();
      }
    }
    if (c.ghost()) {
      const Tet& fin = tets_[c.n[3]];
      const FacetRef m = mirror({t, 3});
      if (orient3d(points_[c.v[0]], points_[c.v[1]], points_[c.v[2]], points_[fin.v[m.face]]) >= 0) {
        err << "ghost " << t << " is inverted";
        return err.str();
      }
    } else {
      for (VertexId v : c.v)
        if (v == kInfinite) {
          err << "tet " << t << " has infinite vertex outside slot 3";
          return err.str();
        }
      if (orient3d(points_[c.v[0]], points_[c.v[1]], points_[c.v[2]], points_[c.v[3]]) <= 0) {
        err << "tet " << t << " is not positively oriented";
        return err.str();
      }
    }
  }
  return {};
}

void Tessellation::write_hull_off(std::ostream& os) const {
  std::vector<std::array<VertexId, 3>> faces;
  std::vector<VertexId> remap(points_.size(), -1);
  std::vector<VertexId> used;
  for (const Tet& c : tets_) {
    if (!c.alive || !c.ghost()) continue;
    std::array<VertexId, 3> f{c.v[0], c.v[1], c.v[2]};
    for (auto& v : f) {
      if (remap[v] < 0) {
        remap[v] = static_cast<VertexId>(used.size());
        used.push_back(v);
      }
      v = remap[v];
    }
    faces.push_back(f);
  }
  os << "OFF\n" << used.size() << ' ' << faces.size() << " 0\n";
  for (VertexId v : used) os << points_[v].x << ' ' << points_[v].y << ' ' << points_[v].z << '\n';
  for (const auto& f : faces) os << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

}  // namespace rdel
