#pragma once

#include <cstdint>

namespace ccdist {

// Scalar kernels underlying the reference function and the closed-form distance
// formulas.  All functions of s below are built from
//
//   f(s)   = 1 - s*cot(s)
//   mu(s)  = f'(s) = (2s - sin 2s) / (2 sin^2 s)
//   psi(s) = f(s) / s^2
//
// extended by parity (f, psi even; mu odd) and evaluated with three branches:
// a Taylor branch near 0, a partial-fraction branch near the poles s = k*pi,
// and direct trigonometric formulas elsewhere.  Branch agreement on the
// overlaps is part of the test suite.
enum class KernelName : std::uint8_t {
  F,             // 1 - s cot s
  MU,            // f'
  PSI,           // f / s^2
  PSI1,          // psi'
  PSI2,          // psi''
  S_OVER_SIN,    // s / sin s
  S_OVER_SIN_SQ, // (s / sin s)^2
  S_COT_S,       // s cot s
};

double kernel_eval(KernelName name, double s);

double s_cot_s(double s);
double f_kernel(double s);
double mu_kernel(double s);
double mu_prime(double s);  // f''(s) = 2 f(s) / sin^2 s
double psi_kernel(double s);
double psi_d1(double s);
double psi_d2(double s);
double s_over_sin(double s);
double s_over_sin_sq(double s);

// Inverse of the odd increasing diffeomorphism mu : (-pi, pi) -> R.
// Postcondition: |mu(result) - y| <= 1e-12 * (1 + |y|).
double mu_inverse(double y);

// First positive root of tan s = s, located in (pi, 3*pi/2).  Computed once by
// bisection to absolute accuracy 1e-14 and cached.
double theta1();

// Coefficients of the quadratic form controlling the Lambda / Upsilon maps:
//   k1 = psi'(r)/r            (> 0)
//   k2 = (psi''(r) - psi'(r)/r) / r^2   (< 0 on (pi, theta1))
//   k3 = 2*psi(r) + k1*v2^2
// Only defined for r in (pi, theta1); throws DomainError outside.
struct KConstants {
  double k1;
  double k2;
  double k3;
};
KConstants k_constants(double r, double v2);

}  // namespace ccdist
