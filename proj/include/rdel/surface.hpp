#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rdel/geometry.hpp"
#include "rdel/mesh_io.hpp"

namespace rdel {

/// A point on the input surface together with where it was found.
struct SurfaceHit {
  Point3 point;
  std::int32_t triangle = -1;
  std::array<real, 3> bary{};
  real t = 0;  // parameter along the query (segment in [0,1], ray distance, circle angle, or distance)
};

/// Undirected edge of the input mesh with its two incident triangles.
struct SurfaceEdge {
  std::int32_t a = 0, b = 0;  // a < b
  std::array<std::int32_t, 2> faces{};
};

/// Validated closed, edge-manifold, consistently oriented triangle mesh with an
/// AABB hierarchy for segment, ray, circle, containment and proximity queries.
/// Immutable after construction; every query is safe to call concurrently.
class SurfacePolyhedron {
 public:
  /// Validates and indexes the mesh. Throws InputError naming the first
  /// offending edge or face. Components enclosing negative volume are flipped
  /// so every normal points out of the enclosed region.
  explicit SurfacePolyhedron(TriMesh mesh);
  static SurfacePolyhedron load(const std::filesystem::path& path);

  std::span<const Point3> vertices() const { return mesh_.vertices; }
  std::span<const Triangle> triangles() const { return mesh_.triangles; }
  const TriMesh& mesh() const { return mesh_; }
  const Vec3& normal(std::int32_t tri) const { return normals_[static_cast<std::size_t>(tri)]; }
  /// Angle-weighted vertex normal.
  const Vec3& vertex_normal(std::int32_t v) const { return vertex_normals_[static_cast<std::size_t>(v)]; }
  std::span<const SurfaceEdge> edges() const { return edges_; }
  /// Vertex-to-vertex adjacency (CSR layout): neighbours of v are
  /// adjacency()[adjacency_offsets()[v] .. adjacency_offsets()[v+1]).
  std::span<const std::int32_t> adjacency_offsets() const { return adj_off_; }
  std::span<const std::int32_t> adjacency() const { return adj_; }

  int num_components() const { return num_components_; }
  std::int32_t triangle_component(std::int32_t tri) const { return tri_component_[static_cast<std::size_t>(tri)]; }
  std::int32_t vertex_component(std::int32_t v) const { return vertex_component_[static_cast<std::size_t>(v)]; }
  /// Number of components whose orientation was reversed during validation.
  int flipped_components() const { return flipped_; }

  const Box3& bbox() const { return bbox_; }
  real diagonal() const { return diagonal_; }
  /// Distance below which two hits are considered the same point.
  real dedup_tolerance() const { return 1e-10 * diagonal_; }

  /// Hits of the segment [a, b] sorted by parameter in [0, 1].
  std::vector<SurfaceHit> intersect_segment(const Point3& a, const Point3& b) const;
  /// Hits of the ray origin + t*dir, t >= 0, sorted by t. dir must be unit.
  std::vector<SurfaceHit> intersect_ray(const Point3& origin, const Vec3& dir) const;
  /// Points of the surface lying on plane and on the sphere (centre, radius);
  /// sorted by angle about centre within the plane.
  std::vector<SurfaceHit> intersect_circle(const Plane3& plane, const Point3& centre, real radius) const;

  /// Inside test by ray parity; points within 1e-10 * diagonal of the
  /// surface count as inside.
  bool contains(const Point3& p) const;
  /// Closest surface point; t holds the distance.
  SurfaceHit nearest_point(const Point3& p) const;

 private:
  struct Node {
    Box3 box;
    std::int32_t left = -1, right = -1;  // children, or -1 for a leaf
    std::int32_t begin = 0, end = 0;     // range into order_ for leaves
  };

  void validate_and_orient();
  void build_tree();
  std::int32_t build_node(std::int32_t begin, std::int32_t end, int depth);

  // Line query over t in [t0, t1]; grazing reports whether any candidate
  // triangle was hit edge-on.
  void line_hits(const Point3& o, const Vec3& d, real t0, real t1, std::vector<SurfaceHit>& out,
                 std::vector<std::int32_t>* grazing) const;
  std::vector<SurfaceHit> line_query(const Point3& o, const Vec3& d, real t0, real t1) const;
  template <class BoxTest, class Visit>
  void traverse(BoxTest&& box_test, Visit&& visit) const;
  void circle_hits_triangle(std::int32_t tri, const Plane3& plane, const Point3& centre, real radius,
                            std::vector<SurfaceHit>& out) const;
  bool near_surface(const Point3& p, real tol) const;
  std::array<real, 3> barycentric(std::int32_t tri, const Point3& p) const;

  TriMesh mesh_;
  std::vector<Vec3> normals_;
  std::vector<Vec3> vertex_normals_;
  std::vector<SurfaceEdge> edges_;
  std::vector<std::int32_t> adj_off_, adj_;
  std::vector<std::int32_t> tri_component_, vertex_component_;
  int num_components_ = 0;
  int flipped_ = 0;
  Box3 bbox_;
  real diagonal_ = 0;

  std::vector<Node> nodes_;
  std::vector<std::int32_t> order_;
  std::vector<Box3> tri_boxes_;
};

}  // namespace rdel
