#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rdel/geometry.hpp"

namespace rdel {

using VertexId = std::int32_t;
using TetId = std::int32_t;

inline constexpr VertexId kInfinite = -1;
inline constexpr TetId kNoTet = -1;

/// Sorted vertex-id triple; stable identity of a 2-face across cavity updates.
struct FacetKey {
  std::array<VertexId, 3> v{};

  static FacetKey of(VertexId a, VertexId b, VertexId c);
  friend bool operator==(const FacetKey&, const FacetKey&) = default;
  friend auto operator<=>(const FacetKey&, const FacetKey&) = default;
};

struct EdgeKey {
  std::array<VertexId, 2> v{};

  static EdgeKey of(VertexId a, VertexId b) { return a < b ? EdgeKey{{a, b}} : EdgeKey{{b, a}}; }
  friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct FacetKeyHash {
  std::size_t operator()(const FacetKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto x : k.v) h = (h ^ static_cast<std::uint32_t>(x)) * 1099511628211ull;
    return static_cast<std::size_t>(h);
  }
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& k) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.v[0])) << 32) |
                                      static_cast<std::uint32_t>(k.v[1]));
  }
};

/// Tetrahedron record. Finite cells are positively oriented (orient3d > 0).
/// Ghost cells keep the vertex at infinity in slot 3 and are oriented so the
/// infinite vertex sits on the positive side of the hull face (v0, v1, v2).
/// Face i is the face opposite v[i]; n[i] is the cell across it.
struct Tet {
  std::array<VertexId, 4> v{};
  std::array<TetId, 4> n{kNoTet, kNoTet, kNoTet, kNoTet};
  bool alive = false;

  bool ghost() const { return v[3] == kInfinite; }
};

/// A 2-face of the complex, named by a cell and the local index of the
/// vertex opposite the face.
struct FacetRef {
  TetId tet = kNoTet;
  int face = 0;
};

/// Dual Voronoi edge of a finite 2-face, parameterised along the facet axis
/// line cc + t*axis (cc = facet circumcentre, axis = unit facet normal).
/// Bounded edges span t in [t0, t1]; rays start at t0 and run to +/-inf.
struct VoronoiEdge {
  FacetRef facet;
  std::array<VertexId, 3> vertices{};
  Ball3 diametric;
  Vec3 axis;
  real t0 = 0;
  real t1 = 0;
  bool ray = false;

  Point3 at(real t) const { return diametric.centre + axis * t; }
  Point3 start() const { return at(t0); }
  /// End point for bounded edges.
  Point3 end() const { return at(t1); }
  /// Unit direction of a ray (from start, away from the finite cell).
  Vec3 direction() const { return t1 > t0 ? axis : -axis; }
};

/// Result of a Bowyer-Watson insertion (or dry-run probe).
struct InsertResult {
  bool inserted = false;
  VertexId vertex = kInfinite;          // new id, or the duplicate's id when rejected
  real nearest_distance = 0;            // distance from the point to its nearest existing vertex
  VertexId nearest_vertex = kInfinite;
  std::vector<TetId> destroyed;
  std::vector<std::array<VertexId, 4>> destroyed_vertices;
  std::vector<TetId> created;
};

/// Incremental 3D Delaunay tessellation with ghost cells closing the hull.
/// Exact predicates; cospherical ties broken symbolically by vertex id.
/// Mutation is single-threaded. Const queries other than probe() may run
/// concurrently on a quiescent tessellation.
class Tessellation {
 public:
  /// Builds Del(points). Throws std::invalid_argument if fewer than four
  /// affinely independent points are supplied. Points closer than
  /// 1e-12 * bbox diagonal to an earlier point are dropped and counted.
  static Tessellation build(std::span<const Point3> points);

  /// Inserts p. Duplicates (within duplicate_tolerance()) are rejected
  /// without modifying the complex.
  InsertResult insert(const Point3& p);

  /// Computes the conflict region of p without modifying anything; reports
  /// the nearest existing vertex. Not thread-safe (moves the walk hint).
  InsertResult probe(const Point3& p) const;

  std::size_t num_vertices() const { return points_.size(); }
  const Point3& vertex(VertexId v) const { return points_[static_cast<std::size_t>(v)]; }
  std::span<const Point3> vertices() const { return points_; }

  std::size_t tet_capacity() const { return tets_.size(); }
  const Tet& tet(TetId t) const { return tets_[static_cast<std::size_t>(t)]; }
  std::size_t num_finite_tets() const { return finite_count_; }
  std::size_t num_ghost_tets() const { return live_count_ - finite_count_; }
  std::vector<TetId> finite_tets() const;

  /// Each finite 2-face exactly once.
  std::vector<FacetRef> finite_facets() const;
  std::array<VertexId, 3> facet_vertices(FacetRef f) const;
  FacetRef mirror(FacetRef f) const;

  VoronoiEdge voronoi_edge(FacetRef f) const;
  Point3 circumcentre(TetId t) const;

  std::size_t duplicates_collapsed() const { return duplicates_; }
  /// Vertex id of each point passed to build(); a collapsed duplicate maps to
  /// the vertex it merged into.
  std::span<const VertexId> input_vertex_ids() const { return input_ids_; }
  real duplicate_tolerance() const { return dup_tol_; }
  void set_duplicate_tolerance(real tol) { dup_tol_ = tol; }

  /// Point location by visibility walk from the last touched cell. Returns a
  /// finite cell containing p (closed) or a ghost whose hull face sees p.
  TetId locate(const Point3& p) const;

  /// Structural check: neighbour symmetry and orientation. Empty string if ok.
  std::string check_structure() const;

  /// Writes the convex-hull boundary as OFF (diagnostics).
  void write_hull_off(std::ostream& os) const;

 private:
  bool in_conflict(TetId t, const Point3& p, VertexId pid) const;
  void conflict_region(const Point3& p, VertexId pid, std::vector<TetId>& cavity,
                       std::vector<FacetRef>& boundary) const;
  TetId new_tet();
  void free_tet(TetId t);

  std::vector<Point3> points_;
  std::vector<Tet> tets_;
  std::vector<TetId> free_;
  std::vector<VertexId> input_ids_;
  std::size_t finite_count_ = 0;
  std::size_t live_count_ = 0;
  std::size_t duplicates_ = 0;
  real dup_tol_ = 0;

  mutable TetId hint_ = 0;
  mutable std::uint32_t walk_rot_ = 0;
  mutable std::uint32_t stamp_ = 0;
  mutable std::vector<std::uint32_t> mark_;
};

}  // namespace rdel
