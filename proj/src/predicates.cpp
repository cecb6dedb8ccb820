#include "rdel/predicates.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

namespace rdel {

namespace {

// Half an ulp of 1.0; error-bound constants follow Shewchuk's first-stage
// bounds for the expressions evaluated below.
constexpr real kEps = 0x1p-53;
constexpr real kOrientBound = (7.0 + 56.0 * kEps) * kEps;
constexpr real kInsphereBound = (16.0 + 224.0 * kEps) * kEps;

std::atomic<std::uint64_t> g_orient_exact{0};
std::atomic<std::uint64_t> g_insphere_exact{0};

int sign_of(const mpq_class& q) { return sgn(q); }

// Shewchuk's orient3d sign convention: positive when d is below the plane of
// counter-clockwise abc. The public orient3d is its negation.
int orient3d_exact_shewchuk(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  const mpq_class adx = mpq_class(a.x) - d.x, ady = mpq_class(a.y) - d.y, adz = mpq_class(a.z) - d.z;
  const mpq_class bdx = mpq_class(b.x) - d.x, bdy = mpq_class(b.y) - d.y, bdz = mpq_class(b.z) - d.z;
  const mpq_class cdx = mpq_class(c.x) - d.x, cdy = mpq_class(c.y) - d.y, cdz = mpq_class(c.z) - d.z;
  const mpq_class det = adx * (bdy * cdz - bdz * cdy) + bdx * (cdy * adz - cdz * ady) +
                        cdx * (ady * bdz - adz * bdy);
  return sign_of(det);
}

int orient3d_shewchuk(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  const real adx = a.x - d.x, bdx = b.x - d.x, cdx = c.x - d.x;
  const real ady = a.y - d.y, bdy = b.y - d.y, cdy = c.y - d.y;
  const real adz = a.z - d.z, bdz = b.z - d.z, cdz = c.z - d.z;

  const real bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const real cdxady = cdx * ady, adxcdy = adx * cdy;
  const real adxbdy = adx * bdy, bdxady = bdx * ady;

  const real det = adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady);
  const real permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * std::abs(adz) +
                         (std::abs(cdxady) + std::abs(adxcdy)) * std::abs(bdz) +
                         (std::abs(adxbdy) + std::abs(bdxady)) * std::abs(cdz);
  const real bound = kOrientBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  g_orient_exact.fetch_add(1, std::memory_order_relaxed);
  return orient3d_exact_shewchuk(a, b, c, d);
}

// Lifted 4x4 determinant relative to e; positive when e is inside the sphere of
// (a,b,c,d) with Shewchuk-positive orientation.
int insphere_exact_shewchuk(const Point3& a, const Point3& b, const Point3& c, const Point3& d,
                            const Point3& e) {
  const mpq_class aex = mpq_class(a.x) - e.x, aey = mpq_class(a.y) - e.y, aez = mpq_class(a.z) - e.z;
  const mpq_class bex = mpq_class(b.x) - e.x, bey = mpq_class(b.y) - e.y, bez = mpq_class(b.z) - e.z;
  const mpq_class cex = mpq_class(c.x) - e.x, cey = mpq_class(c.y) - e.y, cez = mpq_class(c.z) - e.z;
  const mpq_class dex = mpq_class(d.x) - e.x, dey = mpq_class(d.y) - e.y, dez = mpq_class(d.z) - e.z;

  const mpq_class ab = aex * bey - bex * aey;
  const mpq_class bc = bex * cey - cex * bey;
  const mpq_class cd = cex * dey - dex * cey;
  const mpq_class da = dex * aey - aex * dey;
  const mpq_class ac = aex * cey - cex * aey;
  const mpq_class bd = bex * dey - dex * bey;

  const mpq_class abc = aez * bc - bez * ac + cez * ab;
  const mpq_class bcd = bez * cd - cez * bd + dez * bc;
  const mpq_class cda = cez * da + dez * ac + aez * cd;
  const mpq_class dab = dez * ab + aez * bd + bez * da;

  const mpq_class alift = aex * aex + aey * aey + aez * aez;
  const mpq_class blift = bex * bex + bey * bey + bez * bez;
  const mpq_class clift = cex * cex + cey * cey + cez * cez;
  const mpq_class dlift = dex * dex + dey * dey + dez * dez;

  const mpq_class det = (dlift * abc - clift * dab) + (blift * cda - alift * bcd);
  return sign_of(det);
}

int insphere_shewchuk(const Point3& a, const Point3& b, const Point3& c, const Point3& d,
                      const Point3& e) {
  const real aex = a.x - e.x, bex = b.x - e.x, cex = c.x - e.x, dex = d.x - e.x;
  const real aey = a.y - e.y, bey = b.y - e.y, cey = c.y - e.y, dey = d.y - e.y;
  const real aez = a.z - e.z, bez = b.z - e.z, cez = c.z - e.z, dez = d.z - e.z;

  const real aexbey = aex * bey, bexaey = bex * aey;
  const real bexcey = bex * cey, cexbey = cex * bey;
  const real cexdey = cex * dey, dexcey = dex * cey;
  const real dexaey = dex * aey, aexdey = aex * dey;
  const real aexcey = aex * cey, cexaey = cex * aey;
  const real bexdey = bex * dey, dexbey = dex * bey;

  const real ab = aexbey - bexaey;
  const real bc = bexcey - cexbey;
  const real cd = cexdey - dexcey;
  const real da = dexaey - aexdey;
  const real ac = aexcey - cexaey;
  const real bd = bexdey - dexbey;

  const real abc = aez * bc - bez * ac + cez * ab;
  const real bcd = bez * cd - cez * bd + dez * bc;
  const real cda = cez * da + dez * ac + aez * cd;
  const real dab = dez * ab + aez * bd + bez * da;

  const real alift = aex * aex + aey * aey + aez * aez;
  const real blift = bex * bex + bey * bey + bez * bez;
  const real clift = cex * cex + cey * cey + cez * cez;
  const real dlift = dex * dex + dey * dey + dez * dez;

  const real det = (dlift * abc - clift * dab) + (blift * cda - alift * bcd);

  const real aezplus = std::abs(aez), bezplus = std::abs(bez);
  const real cezplus = std::abs(cez), dezplus = std::abs(dez);
  const real abplus = std::abs(aexbey) + std::abs(bexaey);
  const real bcplus = std::abs(bexcey) + std::abs(cexbey);
  const real cdplus = std::abs(cexdey) + std::abs(dexcey);
  const real daplus = std::abs(dexaey) + std::abs(aexdey);
  const real acplus = std::abs(aexcey) + std::abs(cexaey);
  const real bdplus = std::abs(bexdey) + std::abs(dexbey);
  const real permanent = ((cdplus * bezplus + bdplus * cezplus + bcplus * dezplus) * alift +
                          (daplus * cezplus + acplus * dezplus + cdplus * aezplus) * blift +
                          (abplus * dezplus + bdplus * aezplus + daplus * bezplus) * clift +
                          (bcplus * aezplus + acplus * bezplus + abplus * cezplus) * dlift);
  const real bound = kInsphereBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  g_insphere_exact.fetch_add(1, std::memory_order_relaxed);
  return insphere_exact_shewchuk(a, b, c, d, e);
}

}  // namespace

int orient3d(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  return -orient3d_shewchuk(a, b, c, d);
}

int insphere(const Point3& a, const Point3& b, const Point3& c, const Point3& d, const Point3& e) {
  const int o = orient3d_shewchuk(a, b, c, d);
  if (o == 0) throw DegenerateSimplex("insphere: coplanar base tetrahedron");
  return o * insphere_shewchuk(a, b, c, d, e);
}

int insphere_perturbed(const std::array<const Point3*, 5>& pts,
                       const std::array<std::int64_t, 5>& ids) {
  const Point3& e = *pts[4];
  const int base = orient3d(*pts[0], *pts[1], *pts[2], *pts[3]);
  if (base == 0) throw DegenerateSimplex("insphere: coplanar base tetrahedron");
  const int s = insphere(*pts[0], *pts[1], *pts[2], *pts[3], e);
  if (s != 0) return s;

  // Raising the lifted point of the largest-id vertex decides the tie: if it
  // is the query, the query leaves the sphere; if it is tet vertex k, the
  // sphere grows toward k's side of the opposite face.
  std::array<int, 5> order{};
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return ids[i] > ids[j]; });
  for (int k : order) {
    if (k == 4) return -1;
    std::array<const Point3*, 4> t{pts[0], pts[1], pts[2], pts[3]};
    t[k] = &e;
    const int o = orient3d(*t[0], *t[1], *t[2], *t[3]);
    if (o != 0) return o == base ? 1 : -1;
  }
  return -1;
}

Point3 circumcentre_exact(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  using Q3 = std::array<mpq_class, 3>;
  const auto diff = [](const Point3& p, const Point3& o) {
    return Q3{mpq_class(p.x) - o.x, mpq_class(p.y) - o.y, mpq_class(p.z) - o.z};
  };
  const auto cross3 = [](const Q3& u, const Q3& v) {
    return Q3{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  };
  const auto dot3 = [](const Q3& u, const Q3& v) { return mpq_class(u[0] * v[0] + u[1] * v[1] + u[2] * v[2]); };
  const Q3 ab = diff(b, a), ac = diff(c, a), ad = diff(d, a);
  const Q3 x_cd = cross3(ac, ad), x_db = cross3(ad, ab), x_bc = cross3(ab, ac);
  const mpq_class det = dot3(ab, x_cd);
  if (sgn(det) == 0) throw DegenerateSimplex("circumcentre: flat cell");
  const mpq_class lb = dot3(ab, ab), lc = dot3(ac, ac), ld = dot3(ad, ad);
  const mpq_class den = 2 * det;
  std::array<real, 3> out{};
  const std::array<real, 3> base{a.x, a.y, a.z};
  for (int k = 0; k < 3; ++k) {
    const mpq_class v = base[k] + (x_cd[k] * lb + x_db[k] * lc + x_bc[k] * ld) / den;
    out[k] = v.get_d();
  }
  return {out[0], out[1], out[2]};
}

namespace detail {
PredicateStats predicate_stats() {
  return {g_orient_exact.load(), g_insphere_exact.load()};
}
}  // namespace detail

}  // namespace rdel
