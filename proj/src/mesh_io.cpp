#include "rdel/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rdel {

std::string format_real(real x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

namespace {

std::string lower_ext(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

// Next non-empty, non-comment line of an OFF stream.
bool next_line(std::istream& is, std::string& line, std::size_t& lineno) {
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

real parse_real(const std::string& tok, std::size_t lineno) {
  real v = 0;
  const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
    throw InputError("line " + std::to_string(lineno) + ": bad number '" + tok + "'");
  return v;
}

void check_indices(const TriMesh& m) {
  const auto n = static_cast<std::int64_t>(m.vertices.size());
  for (std::size_t f = 0; f < m.triangles.size(); ++f)
    for (auto v : m.triangles[f])
      if (v < 0 || v >= n)
        throw InputError("face " + std::to_string(f) + " references vertex " + std::to_string(v) + " out of range");
}

}  // namespace

TriMesh read_off(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_line(is, line, lineno)) throw InputError("empty OFF file");
  std::istringstream head(line);
  std::string magic;
  head >> magic;
  if (magic != "OFF") throw InputError("missing OFF header");
  std::int64_t nv = -1, nf = -1, ne = 0;
  if (!(head >> nv)) {
    if (!next_line(is, line, lineno)) throw InputError("missing OFF counts");
    std::istringstream counts(line);
    counts >> nv >> nf >> ne;
  } else {
    head >> nf >> ne;
  }
  if (nv < 0 || nf < 0) throw InputError("bad OFF counts");

  TriMesh m;
  m.vertices.reserve(static_cast<std::size_t>(nv));
  for (std::int64_t i = 0; i < nv; ++i) {
    if (!next_line(is, line, lineno)) throw InputError("OFF truncated in vertex block");
    std::istringstream ls(line);
    std::string x, y, z;
    if (!(ls >> x >> y >> z)) throw InputError("line " + std::to_string(lineno) + ": expected 3 coordinates");
    Point3 p{parse_real(x, lineno), parse_real(y, lineno), parse_real(z, lineno)};
    if (!is_finite(p)) throw InputError("line " + std::to_string(lineno) + ": non-finite coordinate");
    m.vertices.push_back(p);
  }
  m.triangles.reserve(static_cast<std::size_t>(nf));
  for (std::int64_t i = 0; i < nf; ++i) {
    if (!next_line(is, line, lineno)) throw InputError("OFF truncated in face block");
    std::istringstream ls(line);
    int k = 0;
    ls >> k;
    if (k != 3)
      throw InputError("line " + std::to_string(lineno) + ": face with " + std::to_string(k) + " sides (only triangles)");
    Triangle t{};
    if (!(ls >> t[0] >> t[1] >> t[2])) throw InputError("line " + std::to_string(lineno) + ": bad face");
    m.triangles.push_back(t);
  }
  check_indices(m);
  return m;
}

TriMesh read_obj(std::istream& is) {
  TriMesh m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      std::string x, y, z;
      if (!(ls >> x >> y >> z)) throw InputError("line " + std::to_string(lineno) + ": expected 3 coordinates");
      Point3 p{parse_real(x, lineno), parse_real(y, lineno), parse_real(z, lineno)};
      if (!is_finite(p)) throw InputError("line " + std::to_string(lineno) + ": non-finite coordinate");
      m.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<std::int64_t> idx;
      std::string tok;
      while (ls >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        std::int64_t v = 0;
        const auto r = std::from_chars(head.data(), head.data() + head.size(), v);
        if (r.ec != std::errc() || v == 0) throw InputError("line " + std::to_string(lineno) + ": bad face index");
        idx.push_back(v > 0 ? v - 1 : static_cast<std::int64_t>(m.vertices.size()) + v);
      }
      if (idx.size() != 3)
        throw InputError("line " + std::to_string(lineno) + ": face with " + std::to_string(idx.size()) +
                         " sides (only triangles)");
      m.triangles.push_back({static_cast<std::int32_t>(idx[0]), static_cast<std::int32_t>(idx[1]),
                             static_cast<std::int32_t>(idx[2])});
    }
  }
  check_indices(m);
  return m;
}

TriMesh read_mesh(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path.string());
  const std::string ext = lower_ext(path);
  try {
    if (ext == ".off") return read_off(is);
    if (ext == ".obj") return read_obj(is);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  throw InputError(path.string() + ": unsupported mesh format '" + ext + "'");
}

void write_off(std::ostream& os, const TriMesh& m) {
  os << "OFF\n" << m.vertices.size() << ' ' << m.triangles.size() << " 0\n";
  for (const auto& p : m.vertices) os << format_real(p.x) << ' ' << format_real(p.y) << ' ' << format_real(p.z) << '\n';
  for (const auto& t : m.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_obj(std::ostream& os, const TriMesh& m) {
  for (const auto& p : m.vertices)
    os << "v " << format_real(p.x) << ' ' << format_real(p.y) << ' ' << format_real(p.z) << '\n';
  for (const auto& t : m.triangles) os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_mesh(const std::filesystem::path& path, const TriMesh& m) {
  const std::string ext = lower_ext(path);
  if (ext != ".off" && ext != ".obj") throw InputError(path.string() + ": unsupported mesh format '" + ext + "'");
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path.string());
  if (ext == ".off")
    write_off(os, m);
  else
    write_obj(os, m);
  if (!os) throw InputError("write failed: " + path.string());
}

}  // namespace rdel
