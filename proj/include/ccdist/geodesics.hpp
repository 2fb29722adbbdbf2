#pragma once

#include <vector>

#include "ccdist/group.hpp"

namespace ccdist {

// Initial covector of a normal geodesic leaving the identity: horizontal
// velocity zeta0 in R^q and vertical dual theta0 in R^m.
struct Covector {
  Vec zeta0;
  Vec theta0;
};

// Normal geodesic gamma(s) = (x(s), t(s)) on [0, 1]:
//   zeta(s) = exp(2 s u_tilde(theta0)) zeta0,
//   x(s)    = int_0^s zeta(u) du,
//   t_j(s)  = 1/2 int_0^s <U^(j) x(u), zeta(u)> du.
// |zeta(s)| is constant, so the arc length over [0, 1] equals |zeta0|.
struct Geodesic {
  std::vector<double> times;
  std::vector<Point> samples;
  Point endpoint;
  double length = 0.0;
  bool good = false;  // theta0 lies in the good set (endpoint map invertible in x)
};

// Evaluates the geodesic at `samples`+1 uniform parameters (at least the two
// endpoints).  The vertical components are integrated adaptively to an
// absolute tolerance of 1e-11 at the natural scale of the data.
Geodesic exp_map(const Group& g, const Covector& cv, int samples = 1);

// The unique covector with vertical part theta whose geodesic reaches
// horizontal position x at time 1:
//   zeta0 = (U(theta) cot U(theta) + i U(theta)) x.
// Throws BadTheta when theta lies outside the good set.
Covector initial_velocity(const Group& g, const Vec& x, const Vec& theta);

struct GeodesicCandidate {
  Covector covector;
  double length_sq = 0.0;
  // Endpoint mismatch of the re-integrated geodesic against the requested
  // point, as a relative norm; independent of the algebra used to find theta.
  double endpoint_error = 0.0;
};

// Multistart damped-Newton search for vertical covectors theta in the good
// set whose geodesic through x ends at p.  Deterministic for a fixed seed
// count; results are deduplicated and sorted by length.  Geodesics whose
// vertical covector lies outside the good set (e.g. the minimizers above
// points with x = 0) are out of scope for this search.
std::vector<GeodesicCandidate> normal_geodesics_through(const Group& g, const Point& p,
                                                        int seeds = 48);

// For theta in the good set, the geodesic with covector
// zeta0 = initial_velocity(x, theta) ends at (x, t(theta)) where
//   t(theta) = -1/4 grad_tau <U(tau) cot U(tau) x, x> |_theta,
// and its squared length equals the reference function there:
//   |zeta0|^2 = phi((x, t(theta)); theta).
// This routine builds both sides and reports the relative gap.
struct LengthIdentity {
  Point endpoint;
  double phi_value = 0.0;
  double length_sq = 0.0;
  double gap = 0.0;
};
LengthIdentity critical_length_identity(const Group& g, const Vec& x, const Vec& theta);

}  // namespace ccdist
