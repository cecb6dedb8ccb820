#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rdel/delaunay.hpp"
#include "rdel/surface.hpp"

namespace rdel {

/// A 2-face of Del(X) whose dual Voronoi edge meets the surface.
struct RestrictedFacet {
  FacetKey key;
  Ball3 surface_ball;      // largest surface Delaunay ball
  SurfaceHit centre_hit;   // where the ball centre lies on the surface
  std::vector<SurfaceHit> all_hits;
  Ball3 diametric;
  real rho = 0;            // radius-edge ratio
  real size_h = 0;         // sqrt(3) * surface ball radius
  real err_eps = 0;        // distance between surface ball and diametric ball centres
  std::uint64_t generation = 0;
};

/// Classifies one facet. Returns nothing when the dual edge misses the surface.
std::optional<RestrictedFacet> classify_facet(const Tessellation& t, const SurfacePolyhedron& s, FacetRef f);

/// True when the circumcentre of a finite cell lies inside the surface.
bool classify_tet(const Tessellation& t, const SurfacePolyhedron& s, TetId tet);

struct ManifoldReport {
  std::map<int, std::size_t> edge_use;  // facets per edge -> number of edges
  std::size_t vertices = 0, edges = 0, facets = 0;
  long euler = 0;
  int components = 0;
  bool manifold() const { return edge_use.size() == 1 && edge_use.begin()->first == 2; }
};

/// Facets and cells that changed in one update.
struct ChangeSet {
  std::vector<FacetKey> removed;
  std::vector<FacetKey> added;
};

/// Del|Sigma(X) and Del|Omega(X) kept in step with a tessellation.
class RestrictedComplex {
 public:
  RestrictedComplex(const Tessellation& t, const SurfacePolyhedron& s, bool track_volume = true);

  /// Classifies every facet and cell from scratch.
  void rebuild();
  /// Reclassifies exactly the facets and cells touched by one insertion.
  ChangeSet update_after_insert(const InsertResult& r);

  const std::unordered_map<FacetKey, RestrictedFacet, FacetKeyHash>& facets() const { return facets_; }
  const RestrictedFacet* find(const FacetKey& k) const;
  /// Restricted facets having the edge as a side.
  const std::vector<FacetKey>& facets_on_edge(const EdgeKey& e) const;
  const std::unordered_set<TetId>& volume_tets() const { return volume_; }
  bool tracks_volume() const { return track_volume_; }

  /// Facet keys in ascending order (deterministic iteration).
  std::vector<FacetKey> sorted_keys() const;
  ManifoldReport manifoldness_report() const;

 private:
  void add(RestrictedFacet f);
  void remove(const FacetKey& k);

  const Tessellation* tess_;
  const SurfacePolyhedron* surf_;
  bool track_volume_;
  std::uint64_t next_generation_ = 1;
  std::unordered_map<FacetKey, RestrictedFacet, FacetKeyHash> facets_;
  std::unordered_map<EdgeKey, std::vector<FacetKey>, EdgeKeyHash> edge_facets_;
  std::unordered_set<TetId> volume_;
};

}  // namespace rdel
