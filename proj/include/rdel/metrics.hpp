#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>
#include "rdel/mesh_io.hpp"
#include "rdel/sizing.hpp"
#include "rdel/surface.hpp"

namespace rdel {

/// (4*sqrt(3)/3) * A / e_rms^2: 1 for equilateral, 0 for degenerate.
/// Unsigned area; 0 when an edge has zero length.
real area_length(const Point3& a, const Point3& b, const Point3& c);

/// Interior angles in degrees at a, b, c. Degenerate triangles give {0, 0, 180}
/// with the 180 at the vertex between the two other points (or at c when two
/// points coincide).
std::array<real, 3> plane_angles(const Point3& a, const Point3& b, const Point3& c);

/// Unique undirected edges of a mesh, ascending (a < b).
std::vector<std::array<std::int32_t, 2>> mesh_edges(const TriMesh& m);

/// Edge length over the size sampled at the edge midpoint, per unique edge
/// in mesh_edges() order.
std::vector<real> relative_lengths(const TriMesh& m, const SizeField& field);

/// Target size at a point.
using SizeFn = std::function<real(const Point3&)>;
std::vector<real> relative_lengths(const TriMesh& m, const SizeFn& size);

/// Mean absolute deviation of all 3n interior angles about their mean.
real mad_theta(const TriMesh& m);

/// Unsigned angle in degrees, in [0, 90], between each facet normal and the
/// normal of the surface triangle nearest its barycentre.
std::vector<real> normal_deviation(const TriMesh& m, const SurfacePolyhedron& oracle);

/// Fixed-range histogram; values outside the range land in the end bins.
struct Histogram {
  real lo = 0, hi = 1;
  std::vector<std::size_t> counts;

  Histogram(real lo_, real hi_, std::size_t bins) : lo(lo_), hi(hi_), counts(bins, 0) {}
  void add(real x);
  std::size_t total() const;
};

struct ScalarStats {
  real mean = 0, min = 0, max = 0, stddev = 0;
};
ScalarStats summarize(const std::vector<real>& v);

struct QualityReport {
  std::size_t vertices = 0, facets = 0, edges = 0;
  std::vector<real> area_length;                 // per facet, negative for inverted facets
  std::vector<std::array<real, 3>> angles;       // per facet
  std::vector<real> rho;                         // per facet
  std::vector<real> normal_dev;                  // per facet, empty without an oracle
  std::vector<real> h_r;                         // per edge, empty without a field
  std::size_t inverted = 0;

  ScalarStats a_stats, rho_stats, normal_stats, h_r_stats;
  real theta_min = 0, theta_max = 0, mad = 0;
  Histogram a_hist{0, 1, 50}, theta_hist{0, 180, 60}, h_r_hist{0, 2, 50};
};

/// Measures a mesh. With an oracle, facets whose normal opposes the surface
/// normal count as inverted and get a negative a(f). With a field, h_r is filled.
QualityReport measure(const TriMesh& m, const SurfacePolyhedron* oracle, const SizeField* field);
/// Same, with the size given as a function (empty: no h_r).
QualityReport measure(const TriMesh& m, const SurfacePolyhedron* oracle, const SizeFn& size);

/// Stable-order JSON (schema v1). Per-facet arrays are not included.
nlohmann::ordered_json to_json(const QualityReport& r);

/// One row per facet: index,a,theta0,theta1,theta2,rho[,normal_dev].
void write_facet_csv(std::ostream& os, const QualityReport& r);

}  // namespace rdel
