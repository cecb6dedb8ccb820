#pragma once

#include "rdel/mesh_io.hpp"

namespace rdel::shapes {

/// Subdivided icosahedron projected onto a sphere; 20 * 4^subdivisions faces.
TriMesh icosphere(int subdivisions, real radius = 1, Point3 centre = {});

/// Torus about the z axis: major radius R, minor radius r, nu x nv quads.
TriMesh torus(real R, real r, int nu, int nv);

/// Box with half extents h and edges/corners rounded to radius rr, from a
/// structured grid with n cells along the longest side.
TriMesh rounded_box(Vec3 h, real rr, int n);

/// Concatenation of two meshes (vertex indices of b shifted).
TriMesh merge(const TriMesh& a, const TriMesh& b);

}  // namespace rdel::shapes
