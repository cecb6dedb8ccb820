#include "rdel/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "rdel/metrics.hpp"
#include "rdel/refine.hpp"
#include "rdel/shapes.hpp"
#include "rdel/sizing.hpp"

namespace rdel {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::optional<real> parse_number(const std::string& s) {
  real v = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw InputError("cannot write '" + p.string() + "'");
  return os;
}

void write_json(const fs::path& p, const json& j) {
  auto os = open_out(p);
  os << j.dump(2) << '\n';
}

// Size options shared by mesh, compare and sizefield.
struct SizingOptions {
  std::string h;  // constant, field file, or empty (lfs only)
  real lfs_eps = 0.5;
  real grad_limit = 0.2;
};

struct Sizing {
  std::unique_ptr<SizeField> field;
  std::optional<LfsEstimate> lfs;
  json description;
};

Sizing make_sizing(const SurfacePolyhedron& s, const SizingOptions& o, real g) {
  Sizing out;
  std::optional<real> h_const;
  if (!o.h.empty()) {
    h_const = parse_number(o.h);
    if (!h_const) {
      std::ifstream in(o.h);
      if (!in) throw InputError("cannot open size field '" + o.h + "'");
      out.field = std::make_unique<SizeField>(SizeField::read(in, s));
      out.description = {{"source", "file"}, {"path", o.h}, {"sha256", sha256_file(o.h)}, {"g", out.field->g()}};
      return out;
    }
    if (!(*h_const > 0) || !std::isfinite(*h_const)) throw std::invalid_argument("--h must be positive");
  }
  out.lfs = estimate_lfs(s);
  const real user = h_const.value_or(std::numeric_limits<real>::infinity());
  const std::vector<real> uh{user};
  out.field = std::make_unique<SizeField>(build_field(s, *out.lfs, uh, o.lfs_eps, g));
  out.description = {{"source", h_const ? "constant" : "lfs"}};
  if (h_const) out.description["h"] = *h_const;
  out.description["lfs_eps"] = o.lfs_eps;
  out.description["grad_limit"] = g;
  return out;
}

json config_json(const RefineConfig& c) {
  return {{"algorithm", to_string(c.algorithm)}, {"rho_max", c.rho_max},       {"eps_ratio", c.eps_ratio},
          {"alpha", c.alpha},                    {"edge_to_radius", std::sqrt(real(3))},
          {"max_inserts", c.max_inserts},        {"seed_count", c.seed_count}};
}

json run_json(const RefineRun& r) {
  const RefineStats& s = r.stats();
  json j = config_json(r.config());
  j["converged"] = s.converged;
  j["stop_reason"] = s.stop_reason;
  j["inserts"] = {{"seed", s.seeds}, {"type1", s.inserts_type1}, {"type2", s.inserts_type2}};
  j["type2_fallbacks"] = {{"unavailable", s.type2_unavailable},
                          {"not_selected", s.type2_not_selected},
                          {"declined", s.type2_declined_guard}};
  j["duplicates_skipped"] = s.duplicates_skipped;
  j["gate_suspensions"] = s.gate_suspensions;
  const ManifoldReport m = r.complex().manifoldness_report();
  j["topology"] = {{"euler", m.euler}, {"components", m.components}, {"manifold", m.manifold()}};
  j["volume_cells"] = r.complex().volume_tets().size();
  return j;
}

struct MeshOptions {
  std::string in, out, out_vol, report, trace = "off", manifest, algorithm = "fd";
  real rho = 1, eps_ratio = 0.25;
  std::size_t seeds = 0, max_inserts = 2'000'000;
  SizingOptions sizing;
  std::vector<real> grad_sweep;  // compare only
};

RefineConfig make_config(const MeshOptions& o, Algorithm a) {
  RefineConfig c;
  c.rho_max = o.rho;
  c.eps_ratio = o.eps_ratio;
  c.algorithm = a;
  c.seed_count = o.seeds;
  c.max_inserts = o.max_inserts;
  c.validate();
  return c;
}

int cmd_mesh(const MeshOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const auto t_start = Clock::now();
  const RefineConfig cfg = make_config(o, parse_algorithm(o.algorithm));
  const SurfacePolyhedron s = SurfacePolyhedron::load(o.in);
  const auto t_size = Clock::now();
  const Sizing sz = make_sizing(s, o.sizing, o.sizing.grad_limit);
  const double size_s = seconds_since(t_size);

  const auto t_ref = Clock::now();
  const RefineRun r = run(s, *sz.field, cfg);
  const double refine_s = seconds_since(t_ref);
  const TriMesh mesh = r.surface_mesh();

  json outputs;
  if (!o.out.empty()) {
    write_mesh(o.out, mesh);
    outputs["surface"] = o.out;
  }
  if (!o.out_vol.empty()) {
    auto os = open_out(o.out_vol);
    write_medit(os, r.volume_mesh());
    outputs["volume"] = o.out_vol;
  }
  if (!o.report.empty()) {
    json rep;
    rep["quality"] = to_json(measure(mesh, &s, sz.field.get()));
    rep["run"] = run_json(r);
    write_json(o.report, rep);
    outputs["report"] = o.report;
  }
  if (o.trace != "off" && !o.trace.empty()) {
    auto os = open_out(o.trace);
    r.trace().write_csv(os);
    outputs["trace"] = o.trace;
  }

  fs::path manifest = o.manifest;
  if (manifest.empty() && !o.out.empty()) manifest = o.out + ".manifest.json";
  if (manifest.empty() && !o.report.empty()) manifest = o.report + ".manifest.json";
  if (!manifest.empty()) {
    json m;
    m["tool"] = "rdel";
    m["version"] = kToolVersion;
    m["command"] = args;
    m["input"] = {{"path", o.in}, {"sha256", sha256_file(o.in)}};
    m["config"] = config_json(cfg);
    m["sizing"] = sz.description;
    m["deterministic"] = true;
    m["outputs"] = outputs;
    m["timings"] = {{"sizing_s", size_s}, {"refine_s", refine_s}, {"total_s", seconds_since(t_start)}};
    write_json(manifest, m);
  }

  const RefineStats& st = r.stats();
  out << (st.converged ? "converged" : "not converged (" + st.stop_reason + ")") << ": " << mesh.triangles.size()
      << " facets, " << mesh.vertices.size() << " vertices, " << st.inserts_type1 << " type1 + " << st.inserts_type2
      << " type2 inserts\n";
  return st.converged ? kExitOk : kExitNotConverged;
}

json arm_json(const RefineRun& r, const QualityReport& q, double secs) {
  return {{"converged", r.stats().converged},
          {"facets", q.facets},
          {"vertices", q.vertices},
          {"mean_a", q.a_stats.mean},
          {"min_a", q.a_stats.min},
          {"mad", q.mad},
          {"theta_min", q.theta_min},
          {"h_r_mean", q.h_r_stats.mean},
          {"h_r_stddev", q.h_r_stats.stddev},
          {"inserts_type1", r.stats().inserts_type1},
          {"inserts_type2", r.stats().inserts_type2},
          {"time_s", secs}};
}

int cmd_compare(const MeshOptions& o, std::ostream& out) {
  const SurfacePolyhedron s = SurfacePolyhedron::load(o.in);
  std::vector<real> sweep = o.grad_sweep;
  if (sweep.empty()) sweep.push_back(o.sizing.grad_limit);
  json pairs = json::array();
  bool all_converged = true;
  for (real g : sweep) {
    const Sizing sz = make_sizing(s, o.sizing, g);
    json pair;
    pair["grad_limit"] = sz.field->g();
    std::array<QualityReport, 2> q;
    std::array<double, 2> secs{};
    for (int k = 0; k < 2; ++k) {
      const Algorithm a = k == 0 ? Algorithm::DR : Algorithm::FD;
      const auto t0 = Clock::now();
      const RefineRun r = run(s, *sz.field, make_config(o, a));
      secs[k] = seconds_since(t0);
      q[k] = measure(r.surface_mesh(), &s, sz.field.get());
      all_converged = all_converged && r.stats().converged;
      pair[to_string(a)] = arm_json(r, q[k], secs[k]);
    }
    pair["delta"] = {{"mean_a", q[1].a_stats.mean - q[0].a_stats.mean},
                     {"mad", q[1].mad - q[0].mad},
                     {"facets", static_cast<long>(q[1].facets) - static_cast<long>(q[0].facets)},
                     {"time_s", secs[1] - secs[0]},
                     {"time_ratio", secs[0] > 0 ? secs[1] / secs[0] : 0.0}};
    pairs.push_back(pair);
  }
  json rep;
  rep["input"] = {{"path", o.in}, {"sha256", sha256_file(o.in)}};
  rep["pairs"] = pairs;
  if (!o.report.empty())
    write_json(o.report, rep);
  else
    out << rep.dump(2) << '\n';
  return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_sizefield(const std::string& in, const SizingOptions& so, const std::string& out_path,
                  const std::string& dump_lfs, std::ostream& out) {
  const SurfacePolyhedron s = SurfacePolyhedron::load(in);
  if (!so.h.empty() && !parse_number(so.h)) throw std::invalid_argument("sizefield: --h must be a number");
  const Sizing sz = make_sizing(s, so, so.grad_limit);
  {
    auto os = open_out(out_path);
    sz.field->write(os);
  }
  if (!dump_lfs.empty()) {
    auto os = open_out(dump_lfs);
    os << "x y z lfs fallback\n";
    const auto V = s.vertices();
    for (std::size_t i = 0; i < V.size(); ++i)
      os << format_real(V[i].x) << ' ' << format_real(V[i].y) << ' ' << format_real(V[i].z) << ' '
         << format_real(sz.lfs->lfs[i]) << ' ' << int(sz.lfs->fallback[i]) << '\n';
  }
  out << "size field: " << s.vertices().size() << " samples, h in [" << sz.field->min_value() << ", "
      << sz.field->max_value() << "]\n";
  return kExitOk;
}

int cmd_report(const std::string& in, const std::string& h, const std::string& surface, const std::string& out_path,
               const std::string& csv, std::ostream& out) {
  const TriMesh mesh = read_mesh(in);
  std::optional<SurfacePolyhedron> host;  // reference surface, or the mesh itself when only a field file needs one
  if (!surface.empty()) host.emplace(SurfacePolyhedron::load(surface));
  std::unique_ptr<SizeField> field;
  SizeFn size;
  if (!h.empty()) {
    if (auto c = parse_number(h)) {
      if (!(*c > 0) || !std::isfinite(*c)) throw std::invalid_argument("--h must be positive");
      size = [v = *c](const Point3&) { return v; };
    } else {
      // A field file lives on a host surface: the original when given, else the mesh itself.
      if (!host) host.emplace(mesh);
      std::ifstream is(h);
      if (!is) throw InputError("cannot open size field '" + h + "'");
      field = std::make_unique<SizeField>(SizeField::read(is, *host));
      size = [f = field.get()](const Point3& p) { return f->eval(p); };
    }
  }
  const QualityReport q = measure(mesh, surface.empty() ? nullptr : &*host, size);
  const json j = to_json(q);
  if (!out_path.empty())
    write_json(out_path, j);
  else
    out << j.dump(2) << '\n';
  if (!csv.empty()) {
    auto os = open_out(csv);
    write_facet_csv(os, q);
  }
  return kExitOk;
}

int cmd_generate(const std::string& shape, int level, const std::string& out_path, std::ostream& out) {
  TriMesh m;
  if (shape == "sphere") {
    m = shapes::icosphere(level);
  } else if (shape == "torus") {
    m = shapes::torus(1, 0.4, 16 << (level / 2), 8 << (level / 2));
  } else if (shape == "rounded-box") {
    m = shapes::rounded_box({1, 0.7, 0.5}, 0.2, 10 * (level + 1));
  } else if (shape == "two-spheres") {
    m = shapes::merge(shapes::icosphere(level, 1, {-1.5, 0, 0}), shapes::icosphere(level, 1, {1.5, 0, 0}));
  } else {
    throw std::invalid_argument("unknown shape '" + shape + "' (sphere, torus, rounded-box, two-spheres)");
  }
  SurfacePolyhedron check(m);  // refuse to write anything invalid
  write_mesh(out_path, m);
  out << shape << ": " << m.vertices.size() << " vertices, " << m.triangles.size() << " triangles\n";
  return kExitOk;
}

void add_mesh_options(CLI::App* c, MeshOptions& o, bool with_algorithm) {
  c->add_option("--in", o.in, "input surface (.off/.obj)")->required();
  if (with_algorithm) {
    c->add_option("--out", o.out, "output surface mesh (.off/.obj)");
    c->add_option("--out-vol", o.out_vol, "coarse volume mesh (Medit .mesh)");
    c->add_option("--algorithm", o.algorithm, "dr or fd")->capture_default_str();
    c->add_option("--trace", o.trace, "insert trace CSV path, or off")->capture_default_str();
    c->add_option("--manifest", o.manifest, "run manifest path (default <out>.manifest.json)");
    c->add_option("--grad-limit", o.sizing.grad_limit, "gradient limit g")->capture_default_str();
  } else {
    c->add_option("--grad-limit", o.grad_sweep, "gradient limit g; a comma list runs a sweep")->delimiter(',');
  }
  c->add_option("--rho", o.rho, "radius-edge bound")->capture_default_str();
  c->add_option("--h", o.sizing.h, "target edge length: a constant or a size field file");
  c->add_option("--eps-ratio", o.eps_ratio, "surface error bound over local size")->capture_default_str();
  c->add_option("--lfs-eps", o.sizing.lfs_eps, "size bound as a fraction of lfs")->capture_default_str();
  c->add_option("--seeds", o.seeds, "initial sample size (0: automatic)");
  c->add_option("--max-inserts", o.max_inserts, "insert cap")->capture_default_str();
  c->add_option("--report", o.report, "report JSON path");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Restricted Delaunay surface remesher"};
  app.set_help_flag("--help", "print help");  // -h would clash with --h
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  MeshOptions mesh_o, cmp_o;
  auto* mesh = app.add_subcommand("mesh", "remesh a closed surface");
  add_mesh_options(mesh, mesh_o, true);
  auto* cmp = app.add_subcommand("compare", "run both algorithms on the same input");
  add_mesh_options(cmp, cmp_o, false);

  std::string sf_in, sf_out, sf_dump;
  SizingOptions sf_o;
  auto* sf = app.add_subcommand("sizefield", "build and write a size field");
  sf->add_option("--in", sf_in, "input surface")->required();
  sf->add_option("--out", sf_out, "size field file")->required();
  sf->add_option("--h", sf_o.h, "constant user size");
  sf->add_option("--lfs-eps", sf_o.lfs_eps)->capture_default_str();
  sf->add_option("--grad-limit", sf_o.grad_limit)->capture_default_str();
  sf->add_option("--dump-lfs", sf_dump, "per-vertex lfs values");

  std::string rp_in, rp_h, rp_surface, rp_out, rp_csv;
  auto* rp = app.add_subcommand("report", "quality report of a triangle mesh");
  rp->add_option("--in", rp_in, "mesh to measure")->required();
  rp->add_option("--h", rp_h, "size field file or constant");
  rp->add_option("--surface", rp_surface, "reference surface (normals, field host)");
  rp->add_option("--out", rp_out, "report JSON path (default stdout)");
  rp->add_option("--csv", rp_csv, "per-facet CSV path");

  std::string gen_shape, gen_out;
  int gen_level = 3;
  auto* gen = app.add_subcommand("generate", "write a test surface");
  gen->add_option("--shape", gen_shape, "sphere, torus, rounded-box or two-spheres")->required();
  gen->add_option("--level", gen_level, "resolution level")->capture_default_str();
  gen->add_option("--out", gen_out, "output mesh")->required();

  std::vector<const char*> argv{"rdel"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*mesh) return cmd_mesh(mesh_o, args, out);
    if (*cmp) return cmd_compare(cmp_o, out);
    if (*sf) return cmd_sizefield(sf_in, sf_o, sf_out, sf_dump, out);
    if (*rp) return cmd_report(rp_in, rp_h, rp_surface, rp_out, rp_csv, out);
    if (*gen) return cmd_generate(gen_shape, gen_level, gen_out, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace rdel
