#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "rdel/surface.hpp"

namespace rdel {

/// Distance-to-medial-axis estimate at every vertex of the input surface.
struct LfsEstimate {
  std::vector<real> lfs;
  std::vector<Point3> poles;   // inner and finite outer poles (medial point cloud)
  std::vector<char> fallback;  // 1 where no pole existed and the fallback was used
  std::size_t num_fallback = 0;
};

/// Poles from the Delaunay tessellation of the surface vertices: for each
/// vertex the farthest incident circumcentre below and above the vertex
/// normal. Hull vertices have their outer pole at infinity.
LfsEstimate estimate_lfs(const SurfacePolyhedron& s);

/// Piecewise-linear size function stored on the host surface's vertices.
class SizeField {
 public:
  SizeField(const SurfacePolyhedron& host, std::vector<real> values, real g);

  const SurfacePolyhedron& host() const { return *host_; }
  std::span<const real> values() const { return values_; }
  real g() const { return g_; }
  real min_value() const;
  real max_value() const;

  /// Projects p onto the host and interpolates.
  real eval(const Point3& p) const;
  /// Interpolates at a known surface location.
  real eval(const SurfaceHit& h) const;

  /// `sizefield v1 g=<g>` header, then one `x y z h` line per host vertex.
  void write(std::ostream& os) const;
  /// Reads a field written for this host. Throws InputError on a format error,
  /// a sample that does not match the host vertex, a non-positive value, or an
  /// edge violating the Lipschitz bound (the message names the edge).
  static SizeField read(std::istream& is, const SurfacePolyhedron& host);

 private:
  const SurfacePolyhedron* host_;
  std::vector<real> values_;
  real g_;
};

/// Raw size min(user_h, epsilon * lfs) at every vertex.
std::vector<real> raw_sizes(const LfsEstimate& lfs, std::span<const real> user_h, real epsilon);

/// Smallest function below raw that grows by at most g per unit length along
/// the surface edge graph: out(i) = min_j raw(j) + g * graph_distance(i, j).
std::vector<real> limit_gradient(const SurfacePolyhedron& s, std::span<const real> raw, real g);

/// Builds the field; user_h holds one value (constant) or one per vertex.
/// Throws std::invalid_argument for non-positive sizes, epsilon <= 0 or g outside (0, 1).
SizeField build_field(const SurfacePolyhedron& s, const LfsEstimate& lfs, std::span<const real> user_h,
                      real epsilon, real g);

/// Largest relative violation of h(i) <= h(j) + g*|xi - xj| over the edges of s.
real lipschitz_violation(const SurfacePolyhedron& s, std::span<const real> h, real g);

}  // namespace rdel
