#include "rdel/refine.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace rdel {

const char* to_string(Algorithm a) { return a == Algorithm::DR ? "dr" : "fd"; }

Algorithm parse_algorithm(const std::string& s) {
  if (s == "dr" || s == "DR") return Algorithm::DR;
  if (s == "fd" || s == "FD") return Algorithm::FD;
  throw std::invalid_argument("unknown algorithm '" + s + "' (expected dr or fd)");
}

const char* to_string(VertexKind k) {
  switch (k) {
    case VertexKind::Seed: return "seed";
    case VertexKind::TypeI: return "type1";
    case VertexKind::TypeII: return "type2";
  }
  return "?";
}

void RefineConfig::validate() const {
  if (!(rho_max >= 1) || !std::isfinite(rho_max))
    throw std::invalid_argument("rho must be >= 1 (got " + format_real(rho_max) + ")");
  if (!(eps_ratio > 0) || !std::isfinite(eps_ratio))
    throw std::invalid_argument("eps-ratio must be > 0 (got " + format_real(eps_ratio) + ")");
  if (!(alpha > 0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be > 0");
  if (max_inserts == 0) throw std::invalid_argument("max-inserts must be positive");
  if (seed_count != 0 && seed_count < 4) throw std::invalid_argument("seed count must be >= 4");
}

bool bad_simplex(const RestrictedFacet& f, const RefineConfig& cfg, const SizeField& field) {
  const real h = field.eval(f.centre_hit);
  return f.rho > cfg.rho_max || f.err_eps > cfg.eps_ratio * h || f.size_h > cfg.alpha * h;
}

std::vector<std::int32_t> seed_sample(const SurfacePolyhedron& s, std::size_t n) {
  if (n < 4) throw std::invalid_argument("seed count must be >= 4");
  const auto comps = static_cast<std::size_t>(s.num_components());
  if (n < comps)
    throw std::invalid_argument("seed count " + std::to_string(n) + " is below the component count " +
                                std::to_string(comps));
  const auto verts = s.vertices();
  const std::size_t nv = verts.size();
  n = std::min(n, nv);

  std::vector<real> mind(nv, std::numeric_limits<real>::infinity());
  std::vector<std::int32_t> out;
  auto take = [&](std::int32_t v) {
    out.push_back(v);
    for (std::size_t i = 0; i < nv; ++i) mind[i] = std::min(mind[i], distance2(verts[i], verts[v]));
  };
  std::vector<char> have(comps, 0);
  for (std::int32_t v = 0; v < static_cast<std::int32_t>(nv); ++v) {
    const auto c = static_cast<std::size_t>(s.vertex_component(v));
    if (!have[c]) {
      have[c] = 1;
      take(v);
    }
  }
  while (out.size() < n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < nv; ++i)
      if (mind[i] > mind[best]) best = i;
    if (mind[best] == 0) break;
    take(static_cast<std::int32_t>(best));
  }
  return out;
}

Point3 type1_point(const RestrictedFacet& f) { return f.surface_ball.centre; }

namespace {

struct ShortEdge {
  VertexId p, q;
};

ShortEdge short_edge(const Tessellation& t, const FacetKey& k) {
  const int i = shortest_edge(t.vertex(k.v[0]), t.vertex(k.v[1]), t.vertex(k.v[2]));
  return {k.v[i], k.v[(i + 1) % 3]};
}

real altitude(real hs, real half_e) {
  return std::min(std::sqrt(hs * hs - half_e * half_e), std::sqrt(real(3)) / 2 * hs);
}

}  // namespace

std::optional<Type2Candidate> type2_point(const Tessellation& t, const RestrictedFacet& f, const SizeField& field,
                                          const SurfacePolyhedron& s) {
  const ShortEdge e = short_edge(t, f.key);
  const Point3& p = t.vertex(e.p);
  const Point3& q = t.vertex(e.q);
  const Point3 m0 = midpoint(p, q);
  const real half_e = distance(p, q) / 2;
  const Vec3 df = f.surface_ball.centre - m0;
  if (norm(df) <= 1e-12 * std::max(half_e, real(1e-300))) return std::nullopt;
  const Vec3 dir = normalized(df);

  // Predictor from the size at the midpoint, then correct with the sizes at
  // the midpoints of the two new edges.
  real hs = field.eval(m0);
  if (hs <= half_e) return std::nullopt;
  real a = altitude(hs, half_e);
  int iters = 0;
  for (; iters < 4; ++iters) {
    const Point3 x = m0 + dir * a;
    hs = (field.eval(midpoint(p, x)) + field.eval(midpoint(q, x))) / 2;
    if (hs <= half_e) return std::nullopt;
    const real next = altitude(hs, half_e);
    const real change = std::abs(next - a) / a;
    a = next;
    if (change < 1e-6) {
      ++iters;
      break;
    }
  }

  // The bisector plane of e0 holds m0, the diametric centre and the surface
  // ball centre (all equidistant from p and q).
  const Plane3 plane = make_plane(m0, q - p);
  const auto hits = s.intersect_circle(plane, m0, a);
  if (hits.empty()) return std::nullopt;
  const SurfaceHit* best = &hits[0];
  real best_dot = dot(hits[0].point - m0, df);
  for (std::size_t i = 1; i < hits.size(); ++i) {
    const real d = dot(hits[i].point - m0, df);
    if (d > best_dot) {
      best_dot = d;
      best = &hits[i];
    }
  }
  Type2Candidate c;
  c.point = best->point;
  c.altitude = a;
  c.H = std::sqrt(a * a + half_e * half_e);
  c.iterations = iters;
  return c;
}

Selection select_point(const Point3& c1, const std::optional<Point3>& c2, const Point3& m0, real e0_length) {
  Selection sel;
  sel.point = c1;
  sel.kind = VertexKind::TypeI;
  sel.d1 = distance(c1, m0);
  if (!c2) return sel;
  sel.d2 = distance(*c2, m0);
  if (sel.d2 <= sel.d1 && sel.d2 >= e0_length / 2) {
    sel.point = *c2;
    sel.kind = VertexKind::TypeII;
  }
  return sel;
}

void InsertTrace::write_csv(std::ostream& os) const {
  os << "step,kind,rho,r,H,d1,d2,min_edge_before,min_edge_after\n";
  auto opt = [](const std::optional<real>& x) { return x ? format_real(*x) : std::string(); };
  for (const auto& r : rows_) {
    os << r.step << ',' << to_string(r.kind);
    if (r.kind == VertexKind::Seed) {
      os << ",,,,,,,\n";
      continue;
    }
    os << ',' << format_real(r.rho) << ',' << format_real(r.r) << ',' << opt(r.H) << ',' << opt(r.d1) << ','
       << opt(r.d2) << ',' << format_real(r.min_edge_before) << ',' << format_real(r.min_edge_after) << '\n';
  }
}

TraceAudit audit_trace(const InsertTrace& trace, real rho_max) {
  TraceAudit a;
  for (const auto& r : trace.rows()) {
    if (r.kind == VertexKind::Seed) continue;
    ++a.inserts;
    if (r.kind == VertexKind::TypeI && r.rho >= rho_max) {
      ++a.type1_shape_inserts;
      if (r.min_edge_after < r.min_edge_before) ++a.min_edge_decreased;
    }
    if (r.kind == VertexKind::TypeII) {
      ++a.type2_inserts;
      if (!r.H || r.r < *r.H * (1 - 1e-9)) ++a.type2_short_ball;
    }
    const real ratio = r.min_edge_after / r.min_edge_before;
    a.worst_ratio = std::min(a.worst_ratio, ratio);
    if (ratio < 1 / std::sqrt(real(3)) - 1e-9) ++a.ratio_violations;
  }
  return a;
}

namespace {

struct Entry {
  real rho;
  FacetKey key;
  std::uint64_t gen;
};

// Worst ratio first; equal ratios go to the lower key.
struct EntryOrder {
  bool operator()(const Entry& a, const Entry& b) const {
    if (a.rho != b.rho) return a.rho < b.rho;
    return b.key < a.key;
  }
};

using Heap = std::priority_queue<Entry, std::vector<Entry>, EntryOrder>;

struct FacetInfo {
  std::uint64_t gen = 0;
  bool bad = false;
  EdgeKey e0;
};

class Driver {
 public:
  Driver(Tessellation& t, RestrictedComplex& rc, const SurfacePolyhedron& s, const SizeField& field,
         const RefineConfig& cfg, InsertTrace& trace, RefineStats& stats)
      : t_(t), rc_(rc), s_(s), field_(field), cfg_(cfg), trace_(trace), stats_(stats) {}

  void run() {
    min_edge_ = initial_min_edge();
    for (const auto& k : rc_.sorted_keys()) track(k);
    for (const auto& k : rc_.sorted_keys()) enqueue(k);

    std::size_t inserts = 0;
    for (;;) {
      if (inserts >= cfg_.max_inserts) {
        stats_.stop_reason = "insert cap reached";
        return;
      }
      bool valve = false;
      auto key = next(valve);
      if (!key) {
        if (deferred_.empty()) {
          stats_.converged = true;
          stats_.stop_reason = "converged";
        } else {
          stats_.stop_reason = "stalled: remaining bad facets only yield duplicate points";
        }
        return;
      }
      if (valve) ++stats_.gate_suspensions;
      if (refine(*key, valve)) ++inserts;
    }
  }

 private:
  real initial_min_edge() const {
    real m = std::numeric_limits<real>::infinity();
    const auto v = t_.vertices();
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j) m = std::min(m, distance(v[i], v[j]));
    return m;
  }

  void track(const FacetKey& k) {
    const RestrictedFacet* f = rc_.find(k);
    FacetInfo fi;
    fi.gen = f->generation;
    fi.bad = bad_simplex(*f, cfg_, field_);
    const ShortEdge e = short_edge(t_, k);
    fi.e0 = EdgeKey::of(e.p, e.q);
    info_[k] = fi;
  }

  bool valid(const Entry& e) const {
    const RestrictedFacet* f = rc_.find(e.key);
    return f && f->generation == e.gen;
  }

  bool gate_open(const FacetKey& k) const {
    const FacetInfo& fi = info_.at(k);
    for (const auto& g : rc_.facets_on_edge(fi.e0))
      if (g != k && !info_.at(g).bad) return true;
    return false;
  }

  void push_ready(const FacetKey& k) {
    const FacetInfo& fi = info_.at(k);
    auto [it, fresh] = ready_gen_.try_emplace(k, fi.gen);
    if (!fresh) {
      if (it->second == fi.gen) return;
      it->second = fi.gen;
    }
    ready_.push({rc_.find(k)->rho, k, fi.gen});
  }

  void enqueue(const FacetKey& k) {
    const FacetInfo& fi = info_.at(k);
    if (!fi.bad) return;
    all_.push({rc_.find(k)->rho, k, fi.gen});
    if (cfg_.algorithm == Algorithm::FD && gate_open(k)) push_ready(k);
  }

  std::optional<FacetKey> pop_valid(Heap& h) {
    while (!h.empty()) {
      const Entry e = h.top();
      h.pop();
      if (valid(e)) return e.key;
    }
    return std::nullopt;
  }

  std::optional<FacetKey> next(bool& valve) {
    valve = false;
    if (cfg_.algorithm == Algorithm::DR) return pop_valid(all_);
    while (!ready_.empty()) {
      const Entry e = ready_.top();
      ready_.pop();
      auto it = ready_gen_.find(e.key);
      if (it != ready_gen_.end() && it->second == e.gen) ready_gen_.erase(it);
      if (!valid(e)) continue;
      // Blocked facets drop out; a change on their short edge brings them back.
      if (gate_open(e.key)) return e.key;
    }
    auto k = pop_valid(all_);
    if (k) valve = true;
    return k;
  }

  bool refine(const FacetKey& key, bool valve) {
    const RestrictedFacet& f = *rc_.find(key);
    const std::uint64_t gen = f.generation;
    TraceRow row;
    row.facet = key;
    row.rho = f.rho;
    row.r = f.surface_ball.radius;
    row.gate_suspended = valve;

    const Point3 c1 = type1_point(f);
    const ShortEdge e = short_edge(t_, key);
    const Point3 m0 = midpoint(t_.vertex(e.p), t_.vertex(e.q));
    const real e0_len = distance(t_.vertex(e.p), t_.vertex(e.q));

    Selection sel{c1, VertexKind::TypeI, distance(c1, m0), 0};
    std::optional<Type2Candidate> c2;
    if (cfg_.algorithm == Algorithm::FD) {
      c2 = type2_point(t_, f, field_, s_);
      sel = select_point(c1, c2 ? std::optional<Point3>(c2->point) : std::nullopt, m0, e0_len);
      row.d1 = sel.d1;
      if (c2) {
        row.d2 = sel.d2;
        row.H = c2->H;
      }
      row.type2_fallback = sel.kind != VertexKind::TypeII;
      if (!c2) ++stats_.type2_unavailable;
      else if (sel.kind != VertexKind::TypeII) ++stats_.type2_not_selected;
      if (sel.kind == VertexKind::TypeII) {
        // Only place c2 where the new edges to e0 are the shortest it forms.
        const InsertResult pr = t_.probe(sel.point);
        if (pr.nearest_distance < c2->H * (1 - 1e-12)) {
          ++stats_.type2_declined_guard;
          sel.kind = VertexKind::TypeI;
          sel.point = c1;
          row.type2_fallback = true;
        }
      }
    }

    InsertResult res = t_.insert(sel.point);
    if (!res.inserted && sel.kind == VertexKind::TypeII) {
      ++stats_.duplicates_skipped;
      sel.kind = VertexKind::TypeI;
      sel.point = c1;
      row.type2_fallback = true;
      res = t_.insert(c1);
    }
    if (!res.inserted) {
      ++stats_.duplicates_skipped;
      deferred_.push_back(key);
      return false;
    }

    row.step = trace_.rows().size();
    row.kind = sel.kind;
    row.min_edge_before = min_edge_;
    min_edge_ = std::min(min_edge_, res.nearest_distance);
    row.min_edge_after = min_edge_;
    trace_.append(row);
    (sel.kind == VertexKind::TypeII ? stats_.inserts_type2 : stats_.inserts_type1) += 1;

    const ChangeSet cs = rc_.update_after_insert(res);
    for (const auto& k : cs.removed) info_.erase(k);
    for (const auto& k : cs.added) track(k);
    for (const auto& k : cs.added) {
      const FacetInfo& fi = info_.at(k);
      if (fi.bad) all_.push({rc_.find(k)->rho, k, fi.gen});
    }
    if (cfg_.algorithm == Algorithm::FD) reopen(cs);

    // A facet that survived its own insertion goes back in the queue.
    if (const RestrictedFacet* g = rc_.find(key); g && g->generation == gen) requeue(key);
    auto pending = std::move(deferred_);
    deferred_.clear();
    for (const auto& k : pending)
      if (rc_.find(k)) requeue(k);
    return true;
  }

  void requeue(const FacetKey& k) {
    const FacetInfo& fi = info_.at(k);
    if (!fi.bad) return;
    all_.push({rc_.find(k)->rho, k, fi.gen});
    if (cfg_.algorithm == Algorithm::FD && gate_open(k)) {
      ready_gen_.erase(k);
      push_ready(k);
    }
  }

  // Facets whose short edge saw a change may have gained a converged neighbour.
  void reopen(const ChangeSet& cs) {
    std::vector<EdgeKey> edges;
    auto collect = [&](const FacetKey& k) {
      edges.push_back(EdgeKey::of(k.v[0], k.v[1]));
      edges.push_back(EdgeKey::of(k.v[1], k.v[2]));
      edges.push_back(EdgeKey::of(k.v[0], k.v[2]));
    };
    for (const auto& k : cs.removed) collect(k);
    for (const auto& k : cs.added) collect(k);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const auto& e : edges)
      for (const auto& g : rc_.facets_on_edge(e)) {
        const FacetInfo& fi = info_.at(g);
        if (fi.bad && fi.e0 == e && gate_open(g)) push_ready(g);
      }
  }

  Tessellation& t_;
  RestrictedComplex& rc_;
  const SurfacePolyhedron& s_;
  const SizeField& field_;
  const RefineConfig& cfg_;
  InsertTrace& trace_;
  RefineStats& stats_;

  real min_edge_ = 0;
  Heap all_, ready_;
  std::unordered_map<FacetKey, std::uint64_t, FacetKeyHash> ready_gen_;
  std::unordered_map<FacetKey, FacetInfo, FacetKeyHash> info_;
  std::vector<FacetKey> deferred_;
};

}  // namespace

RefineRun run(const SurfacePolyhedron& s, const SizeField& field, const RefineConfig& cfg) {
  cfg.validate();
  if (&field.host() != &s) throw std::invalid_argument("size field was built for a different surface");
  RefineRun out;
  out.cfg_ = cfg;
  out.surf_ = &s;

  const std::size_t n =
      cfg.seed_count ? cfg.seed_count : std::max<std::size_t>(32, 4 * static_cast<std::size_t>(s.num_components()));
  const auto idx = seed_sample(s, n);
  std::vector<Point3> pts;
  pts.reserve(idx.size());
  for (auto i : idx) pts.push_back(s.vertices()[static_cast<std::size_t>(i)]);
  out.tess_ = std::make_unique<Tessellation>(Tessellation::build(pts));
  out.tess_->set_duplicate_tolerance(std::max(out.tess_->duplicate_tolerance(), 1e-12 * s.diagonal()));
  out.rc_ = std::make_unique<RestrictedComplex>(*out.tess_, s, cfg.track_volume);
  out.rc_->rebuild();
  out.stats_.seeds = out.tess_->num_vertices();
  for (std::size_t i = 0; i < out.stats_.seeds; ++i) {
    TraceRow row;
    row.step = i;
    row.kind = VertexKind::Seed;
    out.trace_.append(row);
  }

  Driver d(*out.tess_, *out.rc_, s, field, out.cfg_, out.trace_, out.stats_);
  d.run();
  return out;
}

TriMesh RefineRun::surface_mesh() const {
  const auto keys = rc_->sorted_keys();
  std::vector<VertexId> used;
  for (const auto& k : keys) used.insert(used.end(), k.v.begin(), k.v.end());
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  std::unordered_map<VertexId, std::int32_t> remap;
  TriMesh m;
  for (std::size_t i = 0; i < used.size(); ++i) {
    remap.emplace(used[i], static_cast<std::int32_t>(i));
    m.vertices.push_back(tess_->vertex(used[i]));
  }
  for (const auto& k : keys) {
    const RestrictedFacet& f = *rc_->find(k);
    Triangle tri{remap.at(k.v[0]), remap.at(k.v[1]), remap.at(k.v[2])};
    const Vec3 n = triangle_normal(tess_->vertex(k.v[0]), tess_->vertex(k.v[1]), tess_->vertex(k.v[2]));
    if (dot(n, surf_->normal(f.centre_hit.triangle)) < 0) std::swap(tri[1], tri[2]);
    m.triangles.push_back(tri);
  }
  return m;
}

VolumeMesh RefineRun::volume_mesh() const {
  std::vector<std::array<VertexId, 4>> cells;
  for (TetId t : rc_->volume_tets()) cells.push_back(tess_->tet(t).v);
  std::sort(cells.begin(), cells.end(), [](auto a, auto b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a < b;
  });
  std::vector<VertexId> used;
  for (const auto& c : cells) used.insert(used.end(), c.begin(), c.end());
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  std::unordered_map<VertexId, std::int32_t> remap;
  VolumeMesh m;
  for (std::size_t i = 0; i < used.size(); ++i) {
    remap.emplace(used[i], static_cast<std::int32_t>(i));
    m.vertices.push_back(tess_->vertex(used[i]));
  }
  for (const auto& c : cells) m.tets.push_back({remap.at(c[0]), remap.at(c[1]), remap.at(c[2]), remap.at(c[3])});
  return m;
}

void write_medit(std::ostream& os, const VolumeMesh& m) {
  os << "MeshVersionFormatted 2\nDimension 3\nVertices\n" << m.vertices.size() << '\n';
  for (const auto& v : m.vertices)
    os << format_real(v.x) << ' ' << format_real(v.y) << ' ' << format_real(v.z) << " 0\n";
  os << "Tetrahedra\n" << m.tets.size() << '\n';
  for (const auto& t : m.tets) os << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << ' ' << t[3] + 1 << " 0\n";
  os << "End\n";
}

}  // namespace rdel
