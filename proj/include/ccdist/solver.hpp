#pragma once

#include <optional>

#include "ccdist/group.hpp"

namespace ccdist {

enum class MaxLocation { INTERIOR, BOUNDARY };

// Outcome of maximizing the reference function phi(g; .) over Omega*.
struct MaxResult {
  Vec theta;                            // argmax (interior) or final shell point
  double value = 0.0;                   // sup of phi over Omega*
  MaxLocation location = MaxLocation::INTERIOR;
  bool nondegenerate = false;           // interior only: -Hess strictly positive definite
  double min_negative_curvature = 0.0;  // interior only: smallest eigenvalue of -Hess
};

// Damped-Newton ascent of the concave reference function with projection to
// the shrunken balls {opnorm(U(tau)) <= pi - eps}, continued through
// eps in {1e-2, 1e-4, 1e-6, 1e-8}; multistart from tau = 0 and the 2m axis
// seeds.  INTERIOR when the final iterate sits at least 1e-6 inside the
// boundary with gradient below 1e-8 * (1 + |x|^2 + |t|); otherwise BOUNDARY
// with the value extrapolated linearly in eps from the last two shells.
// Throws NonConvergence if no seed finishes within 500 steps per stage.
MaxResult maximize_phi(const Group& g, const Point& p);

// What the maximum certifies about the squared distance:
//   EXACT_STATIONARY  interior nondegenerate maximizer; the value equals d^2
//                     and theta is the vertical covector of the unique
//                     shortest geodesic.
//   EXACT_LIMIT       interior degenerate maximizer; the value equals d^2 as
//                     a limit of stationary cases, and several shortest
//                     geodesics reach the point.
//   LOWER_BOUND       supremum on the boundary of Omega*; the value is
//                     certified only as a lower bound for d^2 (equality holds
//                     on the families covered by the closed forms).
enum class Certificate { EXACT_STATIONARY, EXACT_LIMIT, LOWER_BOUND };

struct DistanceResult {
  double d_squared = 0.0;
  Certificate certificate = Certificate::LOWER_BOUND;
  Vec theta;
  MaxLocation location = MaxLocation::BOUNDARY;
  bool nondegenerate = false;
  // An interior maximizer is the vertical covector of a shortest geodesic,
  // recoverable via initial_velocity(x, theta).
  bool geodesic_available = false;
  // Set by the closed-form family solvers, which know the cut locus exactly;
  // the generic maximizer leaves it empty.
  std::optional<bool> on_cut_locus;
};

DistanceResult distance_squared(const Group& g, const Point& p);

// Shortest-path multiplicity as certified by the maximizer:
//   INTERIOR_UNIQUE    one shortest path (not a cut point),
//   INTERIOR_MULTIPLE  several shortest paths (cut point with an interior
//                      covector; a unique interior critical point of a
//                      concave function cannot be degenerate),
//   BOUNDARY_SUP       supremum on the boundary; multiplicity undecided here.
enum class PointClass { INTERIOR_UNIQUE, INTERIOR_MULTIPLE, BOUNDARY_SUP };

PointClass classify_point(const Group& g, const Point& p);

const char* to_string(MaxLocation l);
const char* to_string(Certificate c);
const char* to_string(PointClass c);

}  // namespace ccdist
