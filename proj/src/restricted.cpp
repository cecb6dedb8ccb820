#include "rdel/restricted.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace rdel {

namespace {

// Parameter range of the line o + t*d inside box, intersected with [lo, hi].
bool clip_line(const Box3& box, const Point3& o, const Vec3& d, real& lo, real& hi) {
  for (int i = 0; i < 3; ++i) {
    if (d[i] == 0) {
      if (o[i] < box.lo[i] || o[i] > box.hi[i]) return false;
      continue;
    }
    real a = (box.lo[i] - o[i]) / d[i], b = (box.hi[i] - o[i]) / d[i];
    if (a > b) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  }
  return lo < hi;
}

std::array<EdgeKey, 3> facet_edges(const FacetKey& k) {
  return {EdgeKey::of(k.v[0], k.v[1]), EdgeKey::of(k.v[1], k.v[2]), EdgeKey::of(k.v[0], k.v[2])};
}

}  // namespace

std::optional<RestrictedFacet> classify_facet(const Tessellation& t, const SurfacePolyhedron& s, FacetRef f) {
  // Everything below depends only on the sorted vertex triple and the two
  // opposite apexes, so a facet gets bit-identical values whichever cell it
  // is reached from.
  const auto fv = t.facet_vertices(f);
  const FacetKey key = FacetKey::of(fv[0], fv[1], fv[2]);
  const Point3& a = t.vertex(key.v[0]);
  const Point3& b = t.vertex(key.v[1]);
  const Point3& c = t.vertex(key.v[2]);
  Ball3 diam;
  try {
    diam = circumball_tri3(a, b, c);
  } catch (const DegenerateSimplex&) {
    return std::nullopt;
  }
  const Vec3 axis = normalized(triangle_normal(a, b, c));
  if (norm2(axis) == 0) return std::nullopt;

  std::array<VertexId, 2> apex{t.tet(f.tet).v[f.face], kInfinite};
  const FacetRef m = t.mirror(f);
  apex[1] = t.tet(m.tet).v[m.face];
  if (apex[1] < apex[0]) std::swap(apex[0], apex[1]);

  // The surface lies inside its bounding box, so only that chord of the dual
  // line needs querying.
  Box3 box = s.bbox();
  const real pad = 1e-6 * s.diagonal();
  box.lo -= Vec3{pad, pad, pad};
  box.hi += Vec3{pad, pad, pad};
  real lo = -std::numeric_limits<real>::infinity(), hi = std::numeric_limits<real>::infinity();
  if (!clip_line(box, diam.centre, axis, lo, hi)) return std::nullopt;

  // A point of the dual line lies on the Voronoi edge exactly when its ball
  // through the facet holds neither apex. This avoids the circumcentres of the
  // two cells, which are ill-conditioned for near-cospherical samples. When an
  // apex sits on the ball to rounding (slivers), the nearest vertex decides.
  std::vector<SurfaceHit> hits;
  for (auto& h : s.intersect_segment(diam.centre + axis * lo, diam.centre + axis * hi)) {
    const Point3& x = h.point;
    const real r2 = std::min({distance2(x, a), distance2(x, b), distance2(x, c)});
    bool empty = true, tie = false;
    for (VertexId v : apex) {
      if (v == kInfinite) continue;
      const real g = distance2(x, t.vertex(v)) - r2;
      if (std::abs(g) <= 1e-9 * r2) tie = true;
      else if (g < 0) empty = false;
    }
    if (empty && tie) {
      const real d = t.probe(x).nearest_distance;
      empty = d * d >= r2 * (1 - 2e-9);
    }
    if (empty) hits.push_back(h);
  }
  if (hits.empty()) return std::nullopt;

  RestrictedFacet rf;
  rf.key = key;
  rf.diametric = diam;
  std::size_t best = 0;
  real best_r = -1;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const Point3& p = hits[i].point;
    const real r = (distance(p, a) + distance(p, b) + distance(p, c)) / 3;
    if (r > best_r) {
      best_r = r;
      best = i;
    }
  }
  rf.centre_hit = hits[best];
  rf.surface_ball = {hits[best].point, best_r};
  rf.all_hits = std::move(hits);
  rf.rho = radius_edge(a, b, c);
  rf.size_h = std::sqrt(real(3)) * best_r;
  rf.err_eps = distance(rf.surface_ball.centre, rf.diametric.centre);
  return rf;
}

bool classify_tet(const Tessellation& t, const SurfacePolyhedron& s, TetId tet) {
  try {
    return s.contains(t.circumcentre(tet));
  } catch (const DegenerateSimplex&) {
    return false;  // circumcentre at infinity: outside any bounded surface
  }
}

RestrictedComplex::RestrictedComplex(const Tessellation& t, const SurfacePolyhedron& s, bool track_volume)
    : tess_(&t), surf_(&s), track_volume_(track_volume) {}

const RestrictedFacet* RestrictedComplex::find(const FacetKey& k) const {
  auto it = facets_.find(k);
  return it == facets_.end() ? nullptr : &it->second;
}

const std::vector<FacetKey>& RestrictedComplex::facets_on_edge(const EdgeKey& e) const {
  static const std::vector<FacetKey> none;
  auto it = edge_facets_.find(e);
  return it == edge_facets_.end() ? none : it->second;
}

void RestrictedComplex::add(RestrictedFacet f) {
  f.generation = next_generation_++;
  for (const auto& e : facet_edges(f.key)) edge_facets_[e].push_back(f.key);
  const FacetKey k = f.key;
  facets_.insert_or_assign(k, std::move(f));
}

void RestrictedComplex::remove(const FacetKey& k) {
  if (facets_.erase(k) == 0) return;
  for (const auto& e : facet_edges(k)) {
    auto it = edge_facets_.find(e);
    if (it == edge_facets_.end()) continue;
    std::erase(it->second, k);
    if (it->second.empty()) edge_facets_.erase(it);
  }
}

void RestrictedComplex::rebuild() {
  facets_.clear();
  edge_facets_.clear();
  volume_.clear();
  for (const FacetRef f : tess_->finite_facets())
    if (auto rf = classify_facet(*tess_, *surf_, f)) add(std::move(*rf));
  if (track_volume_)
    for (TetId t : tess_->finite_tets())
      if (classify_tet(*tess_, *surf_, t)) volume_.insert(t);
}

ChangeSet RestrictedComplex::update_after_insert(const InsertResult& r) {
  ChangeSet cs;
  if (!r.inserted) return cs;
  for (const auto& q : r.destroyed_vertices) {
    for (int i = 0; i < 4; ++i) {
      if (q[3] == kInfinite && i != 3) continue;  // ghost faces through infinity
      std::array<VertexId, 3> f{};
      int m = 0;
      for (int j = 0; j < 4; ++j)
        if (j != i) f[m++] = q[j];
      const FacetKey k = FacetKey::of(f[0], f[1], f[2]);
      if (facets_.contains(k)) {
        remove(k);
        cs.removed.push_back(k);
      }
    }
  }
  for (TetId t : r.destroyed) volume_.erase(t);

  std::unordered_set<FacetKey, FacetKeyHash> seen;
  for (TetId t : r.created) {
    const Tet& c = tess_->tet(t);
    for (int i = 0; i < 4; ++i) {
      const auto fv = tess_->facet_vertices({t, i});
      if (fv[0] == kInfinite || fv[1] == kInfinite || fv[2] == kInfinite) continue;
      const FacetKey k = FacetKey::of(fv[0], fv[1], fv[2]);
      if (!seen.insert(k).second) continue;
      if (auto rf = classify_facet(*tess_, *surf_, {t, i})) {
        add(std::move(*rf));
        cs.added.push_back(k);
      }
    }
    if (track_volume_ && !c.ghost() && classify_tet(*tess_, *surf_, t)) volume_.insert(t);
  }
  std::sort(cs.removed.begin(), cs.removed.end());
  std::sort(cs.added.begin(), cs.added.end());
  return cs;
}

std::vector<FacetKey> RestrictedComplex::sorted_keys() const {
  std::vector<FacetKey> keys;
  keys.reserve(facets_.size());
  for (const auto& [k, f] : facets_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  return keys;
}

ManifoldReport RestrictedComplex::manifoldness_report() const {
  ManifoldReport rep;
  const auto keys = sorted_keys();
  rep.facets = keys.size();
  std::unordered_set<VertexId> verts;
  for (const auto& k : keys) verts.insert(k.v.begin(), k.v.end());
  rep.vertices = verts.size();
  rep.edges = edge_facets_.size();
  for (const auto& [e, fs] : edge_facets_) ++rep.edge_use[static_cast<int>(fs.size())];
  rep.euler = static_cast<long>(rep.vertices) - static_cast<long>(rep.edges) + static_cast<long>(rep.facets);

  std::unordered_map<FacetKey, std::size_t, FacetKeyHash> index;
  for (std::size_t i = 0; i < keys.size(); ++i) index.emplace(keys[i], i);
  std::vector<std::size_t> parent(keys.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [e, fs] : edge_facets_)
    for (std::size_t i = 1; i < fs.size(); ++i) {
      const auto a = find(index.at(fs[0])), b = find(index.at(fs[i]));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  for (std::size_t i = 0; i < keys.size(); ++i) rep.components += find(i) == i;
  return rep;
}

}  // namespace rdel
