#include "rdel/sizing.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

#include "rdel/delaunay.hpp"

namespace rdel {

namespace {

// Static 3-d tree answering nearest-distance queries over a point cloud.
class PointTree {
 public:
  explicit PointTree(std::span<const Point3> pts) : pts_(pts.begin(), pts.end()), idx_(pts.size()) {
    std::iota(idx_.begin(), idx_.end(), 0);
    build(0, idx_.size(), 0);
  }

  real nearest(const Point3& q) const {
    real best = std::numeric_limits<real>::infinity();
    if (!idx_.empty()) search(0, idx_.size(), 0, q, best);
    return std::sqrt(best);
  }

 private:
  void build(std::size_t lo, std::size_t hi, int axis) {
    if (hi - lo <= 1) return;
    const std::size_t mid = (lo + hi) / 2;
    std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                     [&](std::size_t a, std::size_t b) { return pts_[a][axis] < pts_[b][axis]; });
    build(lo, mid, (axis + 1) % 3);
    build(mid + 1, hi, (axis + 1) % 3);
  }

  void search(std::size_t lo, std::size_t hi, int axis, const Point3& q, real& best) const {
    if (lo >= hi) return;
    const std::size_t mid = (lo + hi) / 2;
    const Point3& p = pts_[idx_[mid]];
    best = std::min(best, distance2(p, q));
    const real d = q[axis] - p[axis];
    const int next = (axis + 1) % 3;
    if (d < 0) {
      search(lo, mid, next, q, best);
      if (d * d < best) search(mid + 1, hi, next, q, best);
    } else {
      search(mid + 1, hi, next, q, best);
      if (d * d < best) search(lo, mid, next, q, best);
    }
  }

  std::vector<Point3> pts_;
  std::vector<std::size_t> idx_;
};

real parse_token(const std::string& tok, std::size_t lineno) {
  real v = 0;
  const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
    throw InputError("sizefield line " + std::to_string(lineno) + ": bad number '" + tok + "'");
  return v;
}

}  // namespace

LfsEstimate estimate_lfs(const SurfacePolyhedron& s) {
  const auto V = s.vertices();
  const std::size_t n = V.size();
  const Tessellation del = Tessellation::build(V);
  const auto ids = del.input_vertex_ids();

  // Per tessellation vertex: farthest circumcentre on each side of the normal.
  const std::size_t nt = del.num_vertices();
  std::vector<real> inner_d(nt, -1), outer_d(nt, -1);
  std::vector<Point3> inner_p(nt), outer_p(nt);
  std::vector<char> on_hull(nt, 0);
  std::vector<Vec3> normal(nt);
  for (std::size_t i = 0; i < n; ++i) normal[ids[i]] = s.vertex_normal(static_cast<std::int32_t>(i));

  for (TetId t = 0; t < static_cast<TetId>(del.tet_capacity()); ++t) {
    const Tet& c = del.tet(t);
    if (!c.alive) continue;
    if (c.ghost()) {
      for (int k = 0; k < 3; ++k) on_hull[c.v[k]] = 1;
      continue;
    }
    Point3 cc;
    try {
      cc = del.circumcentre(t);
    } catch (const DegenerateSimplex&) {
      continue;
    }
    for (VertexId v : c.v) {
      const Vec3 d = cc - del.vertex(v);
      const real dist = norm(d);
      if (dot(d, normal[v]) < 0) {
        if (dist > inner_d[v]) {
          inner_d[v] = dist;
          inner_p[v] = cc;
        }
      } else if (dist > outer_d[v]) {
        outer_d[v] = dist;
        outer_p[v] = cc;
      }
    }
  }

  LfsEstimate out;
  for (std::size_t v = 0; v < nt; ++v) {
    if (inner_d[v] >= 0) out.poles.push_back(inner_p[v]);
    if (!on_hull[v] && outer_d[v] >= 0) out.poles.push_back(outer_p[v]);
  }
  const PointTree tree(out.poles);
  const real diag = s.diagonal();
  out.lfs.resize(n);
  out.fallback.assign(n, 0);
  const auto T = s.triangles();
  for (std::size_t i = 0; i < n; ++i) {
    const VertexId v = ids[i];
    real l = inner_d[v] >= 0 ? tree.nearest(V[i]) : std::numeric_limits<real>::infinity();
    if (!(l > 0) || !std::isfinite(l)) {
      // no usable pole: nearest triangle not incident to the vertex
      l = std::numeric_limits<real>::infinity();
      const auto vi = static_cast<std::int32_t>(i);
      for (const auto& t : T) {
        if (t[0] == vi || t[1] == vi || t[2] == vi) continue;
        l = std::min(l, distance(closest_point_on_triangle(V[i], V[t[0]], V[t[1]], V[t[2]]).point, V[i]));
      }
      out.fallback[i] = 1;
      ++out.num_fallback;
    }
    out.lfs[i] = std::min(l, diag);
  }
  return out;
}

std::vector<real> raw_sizes(const LfsEstimate& lfs, std::span<const real> user_h, real epsilon) {
  const std::size_t n = lfs.lfs.size();
  if (user_h.size() != 1 && user_h.size() != n)
    throw std::invalid_argument("user size needs one value or one per vertex");
  std::vector<real> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const real u = user_h.size() == 1 ? user_h[0] : user_h[i];
    if (!(u > 0)) throw std::invalid_argument("user size must be positive");
    raw[i] = std::min(u, epsilon * lfs.lfs[i]);
  }
  return raw;
}

std::vector<real> limit_gradient(const SurfacePolyhedron& s, std::span<const real> raw, real g) {
  const auto V = s.vertices();
  const auto off = s.adjacency_offsets();
  const auto adj = s.adjacency();
  std::vector<real> h(raw.begin(), raw.end());
  using Item = std::pair<real, std::int32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(h.size()); ++i) pq.push({h[i], i});
  while (!pq.empty()) {
    const auto [d, i] = pq.top();
    pq.pop();
    if (d > h[i]) continue;
    for (std::int32_t k = off[i]; k < off[i + 1]; ++k) {
      const std::int32_t j = adj[k];
      const real cand = h[i] + g * distance(V[i], V[j]);
      if (cand < h[j]) {
        h[j] = cand;
        pq.push({cand, j});
      }
    }
  }
  return h;
}

real lipschitz_violation(const SurfacePolyhedron& s, std::span<const real> h, real g) {
  const auto V = s.vertices();
  real worst = 0;
  for (const auto& e : s.edges()) {
    const real bound = g * distance(V[e.a], V[e.b]);
    const real excess = std::abs(h[e.a] - h[e.b]) - bound;
    worst = std::max(worst, excess / std::min(h[e.a], h[e.b]));
  }
  return worst;
}

SizeField build_field(const SurfacePolyhedron& s, const LfsEstimate& lfs, std::span<const real> user_h, real epsilon,
                      real g) {
  if (!(epsilon > 0)) throw std::invalid_argument("lfs epsilon must be positive");
  if (!(g > 0 && g < 1)) throw std::invalid_argument("gradient limit g must lie in (0, 1)");
  return SizeField(s, limit_gradient(s, raw_sizes(lfs, user_h, epsilon), g), g);
}

SizeField::SizeField(const SurfacePolyhedron& host, std::vector<real> values, real g)
    : host_(&host), values_(std::move(values)), g_(g) {
  if (values_.size() != host.vertices().size()) throw std::invalid_argument("size field needs one value per vertex");
  for (real v : values_)
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument("size field values must be positive");
}

real SizeField::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
real SizeField::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

real SizeField::eval(const SurfaceHit& h) const {
  const auto& t = host_->triangles()[static_cast<std::size_t>(h.triangle)];
  return h.bary[0] * values_[t[0]] + h.bary[1] * values_[t[1]] + h.bary[2] * values_[t[2]];
}

real SizeField::eval(const Point3& p) const { return eval(host_->nearest_point(p)); }

void SizeField::write(std::ostream& os) const {
  os << "sizefield v1 g=" << format_real(g_) << '\n';
  const auto V = host_->vertices();
  for (std::size_t i = 0; i < V.size(); ++i)
    os << format_real(V[i].x) << ' ' << format_real(V[i].y) << ' ' << format_real(V[i].z) << ' '
       << format_real(values_[i]) << '\n';
}

SizeField SizeField::read(std::istream& is, const SurfacePolyhedron& host) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(is, line)) throw InputError("empty sizefield file");
  const std::string prefix = "sizefield v1 g=";
  if (line.rfind(prefix, 0) != 0) throw InputError("sizefield: bad header '" + line + "'");
  const real g = parse_token(line.substr(prefix.size()), lineno);
  if (!(g > 0 && g < 1)) throw InputError("sizefield: g must lie in (0, 1)");

  const auto V = host.vertices();
  std::vector<real> h;
  h.reserve(V.size());
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tx, ty, tz, th;
    if (!(ls >> tx)) continue;
    if (!(ls >> ty >> tz >> th)) throw InputError("sizefield line " + std::to_string(lineno) + ": expected x y z h");
    const Point3 p{parse_token(tx, lineno), parse_token(ty, lineno), parse_token(tz, lineno)};
    const real v = parse_token(th, lineno);
    const std::size_t i = h.size();
    if (i >= V.size()) throw InputError("sizefield: more samples than surface vertices");
    if (!(p == V[i]))
      throw InputError("sizefield line " + std::to_string(lineno) + ": sample does not match surface vertex " +
                       std::to_string(i));
    if (!(v > 0) || !std::isfinite(v))
      throw InputError("sizefield line " + std::to_string(lineno) + ": size must be positive");
    h.push_back(v);
  }
  if (h.size() != V.size())
    throw InputError("sizefield: " + std::to_string(h.size()) + " samples for " + std::to_string(V.size()) +
                     " surface vertices");
  for (const auto& e : host.edges()) {
    const real bound = g * distance(V[e.a], V[e.b]);
    if (std::abs(h[e.a] - h[e.b]) > bound + 1e-9 * std::min(h[e.a], h[e.b]))
      throw InputError("sizefield: edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) +
                       ") violates the gradient limit g=" + format_real(g));
  }
  return SizeField(host, std::move(h), g);
}

}  // namespace rdel
