#pragma once

#include <array>
#include <cstdint>

#include "rdel/geometry.hpp"

namespace rdel {

/// Sign of det[b-a, c-a, d-a]: +1 for (0,0,0),(1,0,0),(0,1,0),(0,0,1).
/// Exact: a floating-point filter with a static error bound, escalating to
/// rational arithmetic when the filter cannot certify the sign.
int orient3d(const Point3& a, const Point3& b, const Point3& c, const Point3& d);

/// +1 if e lies strictly inside the circumsphere of (a,b,c,d), -1 strictly
/// outside, 0 on it. Independent of the orientation of (a,b,c,d); throws
/// DegenerateSimplex when the four base points are coplanar.
int insphere(const Point3& a, const Point3& b, const Point3& c, const Point3& d, const Point3& e);

/// insphere with exact ties broken by symbolic perturbation of the lifted
/// coordinates: the point with the largest id is perturbed most. Never
/// returns 0 for distinct points. ids[4] belongs to the query point e.
int insphere_perturbed(const std::array<const Point3*, 5>& pts, const std::array<std::int64_t, 5>& ids);

/// Circumcentre of (a,b,c,d) solved in rational arithmetic and rounded once.
/// Throws DegenerateSimplex only when the points are exactly coplanar.
Point3 circumcentre_exact(const Point3& a, const Point3& b, const Point3& c, const Point3& d);

namespace detail {
/// Counters for how often the exact fallback ran (diagnostics only).
struct PredicateStats {
  std::uint64_t orient_exact = 0;
  std::uint64_t insphere_exact = 0;
};
PredicateStats predicate_stats();
}  // namespace detail

}  // namespace rdel
