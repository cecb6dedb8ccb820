#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdel/geometry.hpp"

namespace rdel {

using Triangle = std::array<std::int32_t, 3>;

/// Indexed triangle mesh as read from / written to disk.
struct TriMesh {
  std::vector<Point3> vertices;
  std::vector<Triangle> triangles;
};

/// Unreadable, malformed or topologically invalid input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

TriMesh read_off(std::istream& is);
TriMesh read_obj(std::istream& is);
/// Dispatches on the extension (.off / .obj, case-insensitive).
TriMesh read_mesh(const std::filesystem::path& path);

// Writers print coordinates in shortest round-trip form, so a read-back
// reproduces every coordinate bit-for-bit.
void write_off(std::ostream& os, const TriMesh& m);
void write_obj(std::ostream& os, const TriMesh& m);
void write_mesh(const std::filesystem::path& path, const TriMesh& m);

/// Shortest decimal string that parses back to exactly x.
std::string format_real(real x);

}  // namespace rdel
