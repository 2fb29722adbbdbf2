#pragma once

#include "ccdist/group.hpp"

namespace ccdist {

// Reference function
//   phi(g; tau) = <U(tau) cot U(tau) x, x> + 4 t . tau,
// finite and smooth wherever no eigenvalue of U(tau) sits on {k*pi : k >= 1};
// concave on Omega*.  Values and derivatives below throw PoleAtEigenvalue when
// an eigenvalue is within 1e-11 * (1 + |lambda|) of a nonzero multiple of pi.
double phi(const Group& g, const Point& p, const Vec& tau);

// Exact gradient via first divided differences of s*cot(s) across the
// eigenbasis of U(tau); eigenvalue pairs closer than 1e-8 * (1 + max|lambda|)
// use the midpoint derivative.
Vec grad_phi(const Group& g, const Point& p, const Vec& tau);

// Symmetrized central finite difference of grad_phi with step
// h = eps^(1/3) * (1 + |tau|) by default.
Mat hess_phi(const Group& g, const Point& p, const Vec& tau);
Mat hess_phi(const Group& g, const Point& p, const Vec& tau, double step);

struct PhiEval {
  double value;
  Vec gradient;
  Mat hessian;
};
PhiEval phi_eval(const Group& g, const Point& p, const Vec& tau);

// Independent route to <Hess phi(g; tau) v, v> anywhere in the good set:
// resolvent series over the poles of s*cot(s), with an analytic tail
// estimate.  Used to cross-check the finite-difference Hessian; does not
// depend on t.
double hess_quadratic_series(const Group& g, const Vec& x, const Vec& tau,
                             const Vec& v, int terms = 4000);

// Degeneracy of a critical point theta of phi(g; .) in direction v.
// The Hessian quadratic form vanishes along v exactly when t.v = 0 and
// u_tilde(v) u_tilde(theta)^j x = 0 for j = 0..q-1.
struct DegeneracyReport {
  Vec direction;
  double hess_quadratic;
  double t_dot_v;
  bool t_orthogonal;      // |t.v| below tolerance
  bool kernel_chain_ok;   // whole chain annihilates x
  bool degenerate() const { return kernel_chain_ok && t_orthogonal; }
};

// Throws NotACriticalPoint unless |grad phi| <= 1e-8 * (1 + |x|^2 + |t|).
DegeneracyReport degeneracy_test(const Group& g, const Point& p, const Vec& theta,
                                 const Vec& v);

// Tolerance scale used for critical-point residuals.
inline double critical_scale(const Point& p) {
  return 1.0 + p.x.squaredNorm() + p.t.norm();
}

}  // namespace ccdist
