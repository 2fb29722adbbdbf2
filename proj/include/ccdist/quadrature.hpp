#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "ccdist/errors.hpp"

namespace ccdist {
namespace gk_detail {

// 15-point Kronrod abscissae (positive half, center last) with the embedded
// 7-point Gauss rule on the odd-indexed nodes.
inline constexpr double kNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0};
inline constexpr double kWeightK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kWeightG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

inline double norm_of(double v) { return std::fabs(v); }
inline double norm_of(const std::complex<double>& v) { return std::abs(v); }
template <typename T>
auto norm_of(const T& v) -> decltype(v.norm()) {
  return v.norm();
}

}  // namespace gk_detail

template <typename T>
struct PanelEstimate {
  T integral;
  double error;
};

// One Gauss-Kronrod 7/15 panel on [a, b].  T may be double, complex, or a
// fixed-size value supporting +, scalar *, and .norm().
template <typename T, typename F>
PanelEstimate<T> gk15(F&& f, double a, double b) {
  using namespace gk_detail;
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kron = kWeightK[7] * fc;
  T gauss = kWeightG[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double d = h * kNodes[i];
    const T lo = f(c - d);
    const T hi = f(c + d);
    const T pair = lo + hi;
    kron += kWeightK[i] * pair;
    if (i % 2 == 1) gauss += kWeightG[i / 2] * pair;
  }
  T diff = kron - gauss;
  return {h * kron, std::fabs(h) * norm_of(diff)};
}

// Adaptive bisection to an absolute tolerance.  Panels are refined
// depth-first, leftmost first, so the accumulation order (and hence the
// floating-point result) does not depend on how refinement interleaves.
template <typename T, typename F>
T gk_adaptive(F&& f, double a, double b, double abs_tol, int max_depth = 48) {
  struct Frame {
    double a, b, tol;
    int depth;
  };
  std::vector<Frame> stack;
  stack.push_back({a, b, abs_tol, 0});
  std::optional<T> acc;
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    PanelEstimate<T> est = gk15<T>(f, fr.a, fr.b);
    if (est.error <= fr.tol || fr.depth >= max_depth) {
      if (est.error > fr.tol)
        throw QuadratureFailure("adaptive quadrature stalled on [" +
                                std::to_string(fr.a) + ", " + std::to_string(fr.b) +
                                "] with error " + std::to_string(est.error));
      if (acc)
        *acc += est.integral;
      else
        acc = est.integral;
    } else {
      const double mid = 0.5 * (fr.a + fr.b);
      stack.push_back({mid, fr.b, 0.5 * fr.tol, fr.depth + 1});
      stack.push_back({fr.a, mid, 0.5 * fr.tol, fr.depth + 1});
    }
  }
  return *acc;
}

}  // namespace ccdist
