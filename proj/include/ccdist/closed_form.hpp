#pragma once

#include <vector>

#include "ccdist/solver.hpp"

namespace ccdist {

// Exact-distance solvers for the three families where the maximization of the
// reference function reduces to low-dimensional scalar equations: groups of
// generalized H-type, star-graph groups K_{1,n}, and the free step-two group
// on three generators.  Each returns a DistanceResult whose value is exact up
// to scalar root-finding tolerance and whose on_cut_locus flag is always set.

// ---------------------------------------------------------------------------
// Generalized H-type groups.
//
// The horizontal layer splits into blocks of size 2*k_j on which
// U(lambda)^2 = -a_j^2 |lambda|^2 I.  The scales a_j are strictly increasing
// with the last one equal to 1, so opnorm(U(tau)) = |tau|.
struct HTypeBlock {
  double a = 1.0;        // scale, in (0, 1]
  Eigen::Index k = 1;    // half the block width (block spans 2k coordinates)
};

struct HTypeSpec {
  std::vector<HTypeBlock> blocks;
  Eigen::Index m = 1;    // vertical dimension

  Eigen::Index q() const;  // sum of the block widths
  // Throws DomainError unless 0 < a_1 < ... < a_last = 1, all k >= 1, m >= 1.
  void validate() const;
};

// Exact squared distance from the identity to (x, t).
//
// When the last block of x is nonzero, or it vanishes but
// 4|t| < sum_j a_j |x_j|^2 mu(a_j pi), the maximizer is interior: |theta|
// solves sum_j a_j |x_j|^2 mu(a_j |theta|) = 4|t| on [0, pi) and
//   d^2 = 4 |t| |theta| + sum_j |x_j|^2 (a_j |theta|) cot(a_j |theta|).
// Otherwise the supremum is only approached as |theta| -> pi and
//   d^2 = pi (4|t| + sum_j a_j |x_j|^2 cot(a_j pi)),
// and the point lies on the cut locus.
DistanceResult htype_distance(const HTypeSpec& spec, const Vec& x, const Vec& t);

// Hurwitz-Radon function: for even n2 = odd * 2^(4k + l) with 0 <= l <= 3,
// returns 8k + 2^l.  Throws OddInput unless n2 is even and positive.
long hurwitz_radon(long n2);

// ---------------------------------------------------------------------------
// Star-graph groups K_{1,n} (n >= 2): q = n + 1, m = n, with the hub
// coordinate x_1 paired against every leg.
//
// Cut locus: x_1 = 0 together with |x* . t| <= (|x*|^2 / sqrt(pi)) sqrt(|t_perp|),
// where t_perp = t - <t, x*/|x*|> x*/|x*|.  There
//   d^2 = |x*|^2 + 4 pi |t_perp|     (4 pi |t| when x* = 0).
// Off the cut locus the problem reduces to two variables
// (tau_1 along x*, tau_2 along t_perp) and is solved exactly by a
// strongly-concave Newton ascent, or by inverting Upsilon when x_1 = 0.
DistanceResult star_distance(Eigen::Index n, const Vec& x, const Vec& t);

// Upsilon(tau) = grad of tau_1^2 psi(|tau|), a diffeomorphism from
// {tau_1 > 0, |tau| < pi} onto {u_1 > (2/sqrt(pi)) sqrt(|u_2|)}.  The forward
// map checks its domain; the inverse checks the image inequality and solves
// to residual 1e-11 * (1 + |u|).  Both throw OutOfRegion.
Eigen::Vector2d star_upsilon(const Eigen::Vector2d& tau);
Eigen::Vector2d star_upsilon_inverse(const Eigen::Vector2d& u);

// ---------------------------------------------------------------------------
// The free step-two group on three generators: q = m = 3,
// u_tilde(tau) x = x cross tau (the convention of make_n32).
//
// After reducing by orthogonal symmetry to x = |x| e1, t = (t1, t2, 0) with
// t1, t2 >= 0, everything happens in the (v1, v2) plane.  Region names:
//   OMEGA_PLUS    {v2 > 0, |v| < pi}
//   OMEGA_MINUS_4 {v2 < 0, pi < v1 < |v| < theta1(), K3 < 0}
//                 with K3 = 2 psi(r) + (psi'(r)/r) v2^2
//   R2_GT         {u2 > (2/sqrt(pi)) sqrt(|u1|)}
//   R2_LT_PLUS    {u1 > 0, 0 < u2 < (2/sqrt(pi)) sqrt(u1)}
enum class Region { OMEGA_PLUS, OMEGA_MINUS_4, R2_GT, R2_LT_PLUS };

bool in_region(Region region, const Eigen::Vector2d& v);

// Lambda(v) = v2 [ (psi'(r)/r) v2 v + 2 psi(r) e2 ], restricted to OMEGA_PLUS
// (mapping onto R2_GT) or OMEGA_MINUS_4 (mapping onto R2_LT_PLUS).  The
// inverse solves to residual 1e-11 * (1 + |u|); in OMEGA_MINUS_4 every Newton
// iterate is required to keep det J_Lambda = v2^2 K < 0.  Throws OutOfRegion
// on bad arguments and NewtonFailure if the iteration cannot finish.
Eigen::Vector2d n32_lambda(const Eigen::Vector2d& v, Region region);
Eigen::Vector2d n32_lambda_inverse(const Eigen::Vector2d& u, Region region);

// Exact squared distance on the free group.  Dispatch after reduction:
// x = 0 gives 4 pi |t|; t = 0 gives |x|^2; u = 4t/|x|^2 in R2_GT inverts
// Lambda in OMEGA_PLUS; u within 2e-5 * sqrt(u1) of the boundary curve
// u2 = (2/sqrt(pi)) sqrt(u1) gives |x|^2 (1 + pi u1), accurate to O(band^2)
// there; u in R2_LT_PLUS inverts Lambda in OMEGA_MINUS_4; u2 = 0 (t parallel
// to x, both nonzero) solves the limiting one-dimensional problem on the
// K3 = 0 curve.  The point is on the cut locus exactly when x and t are
// linearly dependent (the origin excepted).
DistanceResult n32_distance(const Vec& x, const Vec& t);

}  // namespace ccdist
