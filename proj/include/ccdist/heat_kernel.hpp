#pragma once

#include <vector>

#include "ccdist/group.hpp"

namespace ccdist {

// Controls for the oscillatory-integral evaluation of the heat kernel.
struct QuadratureConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  // Maximum bisection depth per panel of the adaptive Gauss-Kronrod scheme.
  int max_level = 48;
  // Imaginary displacement of the integration plane (an m-vector).  Must lie
  // in the open set where the vertical operator norm stays below pi.  Leave
  // empty to derive it from the distance maximizer of the evaluation point,
  // pulled strictly inside that set by a factor 0.99 when it sits on the rim.
  Vec contour_shift;
  // Multiplier on the automatically selected truncation radius.  The tail
  // bound already drives the radius below the requested tolerance; setting 2
  // here is the standard "double the box and compare" acceptance check.
  double radius_scale = 1.0;
};

// Product over the +/- eigenvalue pairs of the vertical operator at lambda of
// rho / sinh(rho), with zero eigenvalues contributing a factor 1.  This is the
// positive square root of det(U/sinh U) on the real plane.
double v_factor(const Group& group, const Vec& lambda);

// The same determinant square root at complex argument i*shift + lambda,
// taken on the branch that is continuous in lambda and positive at lambda = 0.
// The matrix i*U(i*shift + lambda) is complex skew-symmetric, so its spectrum
// splits into +/- pairs and one factor u/sinh(u) per pair realizes exactly
// that branch; no stepwise phase tracking is required.  Throws
// BranchTrackingFailure if the pairing cannot be established numerically and
// DomainError if the shift leaves its admissible domain.
Complex v_factor_shifted(const Group& group, const Vec& shift, const Vec& lambda);

// Unnormalized heat kernel at time h: the integral over lambda in R^m of
// V(i*shift + lambda) * exp(-phi_tilde(g; i*shift + lambda) / (4h)), where
// phi_tilde is the complex reference function.  The contour shift (from cfg
// or derived as documented there) damps the oscillation so the integrand is
// absolutely integrable with an exponentially decaying tail.  Only m <= 2 is
// supported; larger vertical dimensions throw DomainError.  The result is the
// real part of the integral; a disproportionate imaginary residue raises
// QuadratureFailure.  May underflow to 0 for very small h; use
// heat_kernel_log when the exponential scale matters.
double heat_kernel(const Group& group, const Point& g, double h,
                   const QuadratureConfig& cfg = {});

// Natural logarithm of heat_kernel, computed without underflow by splitting
// off the exponential factor exp(-phi(g; shift)/(4h)) analytically.
double heat_kernel_log(const Group& group, const Point& g, double h,
                       const QuadratureConfig& cfg = {});

struct VaradhanResult {
  // The h values actually used (copy of the input list).
  std::vector<double> h;
  // -4 h log p_h(g) for each h, in the same order.
  std::vector<double> neg4h_log_p;
  // Intercept of the least-squares fit  value = d2 + a*h*log(1/h) + b*h,
  // i.e. the small-time extrapolation of the sequence.
  double extrapolated = 0.0;
};

// Evaluates -4 h log p_h(g) along a descending positive list of h values and
// extrapolates h -> 0, which converges to the squared distance.  The contour
// shift is resolved once (from cfg, or from the distance maximizer) and then
// reused for every h so the sequence is smooth in h.
VaradhanResult varadhan_estimate(const Group& group, const Point& g,
                                 const std::vector<double>& h_list,
                                 const QuadratureConfig& cfg = {});

}  // namespace ccdist
