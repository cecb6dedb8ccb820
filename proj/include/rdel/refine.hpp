#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rdel/delaunay.hpp"
#include "rdel/restricted.hpp"
#include "rdel/sizing.hpp"

namespace rdel {

enum class Algorithm { DR, FD };

const char* to_string(Algorithm a);
/// Parses "dr" or "fd"; throws std::invalid_argument otherwise.
Algorithm parse_algorithm(const std::string& s);

struct RefineConfig {
  real rho_max = 1;                  // radius-edge bound, >= 1
  real eps_ratio = 0.25;             // surface error bound as a fraction of the local size
  real alpha = real(4) / 3;          // slack on the size bound
  Algorithm algorithm = Algorithm::FD;
  std::size_t max_inserts = 2'000'000;
  std::size_t seed_count = 0;        // 0: max(32, 4 * components)
  bool track_volume = true;

  /// Throws std::invalid_argument when a bound is out of range.
  void validate() const;
};

/// Every facet whose shape, surface error or size breaks its bound. Strict
/// comparisons: a facet exactly at a bound is accepted.
bool bad_simplex(const RestrictedFacet& f, const RefineConfig& cfg, const SizeField& field);

/// Farthest-point subsample of the surface vertices: first the lowest vertex
/// of every component, then greedy farthest picks (ties to the lower index).
/// Returns vertex indices. Throws std::invalid_argument when n < 4 or n is
/// below the component count.
std::vector<std::int32_t> seed_sample(const SurfacePolyhedron& s, std::size_t n);

enum class VertexKind { Seed, TypeI, TypeII };
const char* to_string(VertexKind k);

/// Centre of the largest surface Delaunay ball.
Point3 type1_point(const RestrictedFacet& f);

struct Type2Candidate {
  Point3 point;
  real altitude = 0;   // a: distance from the edge midpoint
  real H = 0;          // sqrt(a^2 + |e0/2|^2), the new edge length
  int iterations = 0;
};

/// Size-driven point on the bisector plane of the shortest edge. Empty when
/// the local size cannot span the edge, the circle misses the surface, or the
/// frontal direction is undefined.
std::optional<Type2Candidate> type2_point(const Tessellation& t, const RestrictedFacet& f, const SizeField& field,
                                          const SurfacePolyhedron& s);

struct Selection {
  Point3 point;
  VertexKind kind = VertexKind::TypeI;
  real d1 = 0, d2 = 0;
};

/// Chooses c2 when d2 <= d1 and d2 >= |e0|/2, else c1. d1 and d2 are the
/// distances of c1 and c2 from the midpoint of e0.
Selection select_point(const Point3& c1, const std::optional<Point3>& c2, const Point3& m0, real e0_length);

/// One row per inserted vertex.
struct TraceRow {
  std::size_t step = 0;
  VertexKind kind = VertexKind::Seed;
  FacetKey facet;                 // refined facet (unset for seeds)
  real rho = 0, r = 0;
  std::optional<real> H, d1, d2;
  real min_edge_before = 0, min_edge_after = 0;
  bool gate_suspended = false;    // popped through the deadlock valve
  bool type2_fallback = false;    // Type II candidate missing, declined or duplicate
};

class InsertTrace {
 public:
  void append(TraceRow row) { rows_.push_back(row); }
  const std::vector<TraceRow>& rows() const { return rows_; }
  /// CSV with header step,kind,rho,r,H,d1,d2,min_edge_before,min_edge_after.
  void write_csv(std::ostream& os) const;

 private:
  std::vector<TraceRow> rows_;
};

/// Edge-length guarantees checked against a trace.
struct TraceAudit {
  std::size_t inserts = 0;
  std::size_t type1_shape_inserts = 0;  // Type I into facets with rho >= rho_max
  std::size_t type2_inserts = 0;
  std::size_t min_edge_decreased = 0;   // among type1_shape_inserts
  std::size_t type2_short_ball = 0;     // r < H (1 - 1e-9)
  std::size_t ratio_violations = 0;     // after/before < 1/sqrt(3) - 1e-9
  real worst_ratio = 1;
  bool clean() const { return min_edge_decreased == 0 && type2_short_ball == 0 && ratio_violations == 0; }
};
TraceAudit audit_trace(const InsertTrace& trace, real rho_max);

struct RefineStats {
  std::size_t seeds = 0;
  std::size_t inserts_type1 = 0;
  std::size_t inserts_type2 = 0;
  std::size_t type2_unavailable = 0;     // no Type II candidate (edge too long or circle missed)
  std::size_t type2_not_selected = 0;    // candidate failed the distance guards
  std::size_t type2_declined_guard = 0;  // Type II rejected: another vertex nearer than the edge ends
  std::size_t duplicates_skipped = 0;
  std::size_t gate_suspensions = 0;
  bool converged = false;
  std::string stop_reason;
};

struct VolumeMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<std::int32_t, 4>> tets;
};

/// Result of a refinement run. Owns the tessellation and restricted complex.
class RefineRun {
 public:
  const Tessellation& tessellation() const { return *tess_; }
  const RestrictedComplex& complex() const { return *rc_; }
  const InsertTrace& trace() const { return trace_; }
  const RefineStats& stats() const { return stats_; }
  const RefineConfig& config() const { return cfg_; }

  /// Restricted facets as a mesh: vertices in id order, facets in key order,
  /// each wound to agree with the surface normal at its ball centre.
  TriMesh surface_mesh() const;
  /// Cells whose circumcentre lies inside (empty when volume tracking is off).
  VolumeMesh volume_mesh() const;

 private:
  friend RefineRun run(const SurfacePolyhedron& s, const SizeField& field, const RefineConfig& cfg);
  std::unique_ptr<Tessellation> tess_;
  std::unique_ptr<RestrictedComplex> rc_;
  InsertTrace trace_;
  RefineStats stats_;
  RefineConfig cfg_;
  const SurfacePolyhedron* surf_ = nullptr;
};

/// Refines until every restricted facet meets its bounds or the insert cap is hit.
RefineRun run(const SurfacePolyhedron& s, const SizeField& field, const RefineConfig& cfg);

/// Writes cells as a Medit ASCII mesh.
void write_medit(std::ostream& os, const VolumeMesh& m);

}  // namespace rdel
