// Acceptance checks for the distance library.  Each criterion prints exactly
// one line, "CRITERION k: PASS" or "CRITERION k: FAIL" (with indented
// diagnostics above a FAIL), and the process exits 0 only if every selected
// criterion passes.  Run with --criterion k to restrict to a single one.
//
// Everything here is deterministic: fixed mt19937_64 seeds, fixed grids, and
// tolerances pinned next to the checks they guard.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ccdist/closed_form.hpp"
#include "ccdist/geodesics.hpp"
#include "ccdist/group_io.hpp"
#include "ccdist/heat_kernel.hpp"
#include "ccdist/reference.hpp"
#include "ccdist/scalar_kernels.hpp"
#include "ccdist/solver.hpp"

namespace {

using ccdist::Certificate;
using ccdist::Group;
using ccdist::Point;
using ccdist::Region;
using ccdist::Vec;

const double kPi = std::acos(-1.0);

// Failure counter with printf-style diagnostics, indented under the
// criterion banner.
struct Check {
  int failures = 0;
  void require(bool ok, const char* fmt, ...) {
    if (ok) return;
    ++failures;
    if (failures <= 8) {  // keep the log readable when something breaks badly
      std::va_list args;
      va_start(args, fmt);
      std::printf("    ");
      std::vprintf(fmt, args);
      std::printf("\n");
      va_end(args);
    }
  }
};

double rel_gap(double got, double want) {
  return std::fabs(got - want) / (1.0 + std::fabs(want));
}

Eigen::Matrix3d tilted_rotation() {
  return Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized())
      .toRotationMatrix();
}

// u2 = (2/sqrt(pi)) sqrt(u1): the curve separating the reduced vertical
// components with an interior maximizer from those without one.
double curve_height(double u1) { return 2.0 / std::sqrt(kPi) * std::sqrt(u1); }

// ---------------------------------------------------------------------------
// Criterion 1: closed-form vs generic maximizer on random points.
//
// Four families, 500 points each.  Where both sides certify an attained
// maximum the values must agree to 1e-7 relative.  The generic value is a
// supremum over the operator-norm ball, hence never above the closed form
// (1e-8 slack); on the three families whose maximizer always lies in the
// closure of that ball, and on the N3,2 points whose reduced vertical part
// lies on or above the curve, the two agree to 1e-6 even when the
// certificates differ.  Total runtime must stay under 60 seconds.
bool criterion1() {
  Check chk;
  const double tol_exact = 1e-7;
  const double tol_close = 1e-6;
  const double tol_sound = 1e-8;
  const auto t_start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> un(-1.0, 1.0);

  auto check_point = [&](const char* name, const Group& g,
                         const ccdist::DistanceResult& cf, const Point& p,
                         bool equality_family) {
    const auto gen = ccdist::distance_squared(g, p);
    const double cf2 = cf.d_squared, gen2 = gen.d_squared;
    chk.require(gen2 <= cf2 + tol_sound * (1.0 + cf2),
                "%s: generic %.12g exceeds closed form %.12g", name, gen2, cf2);
    if (cf.certificate == Certificate::EXACT_STATIONARY &&
        gen.certificate != Certificate::LOWER_BOUND) {
      chk.require(rel_gap(gen2, cf2) <= tol_exact,
                  "%s: certified values differ, cf=%.12g gen=%.12g", name, cf2,
                  gen2);
    }
    if (equality_family) {
      chk.require(rel_gap(gen2, cf2) <= tol_close,
                  "%s: values differ, cf=%.12g gen=%.12g", name, cf2, gen2);
    }
  };

  {  // Heisenberg H(2,1)
    const Group g = ccdist::make_heisenberg(2);
    const ccdist::HTypeSpec spec{{{1.0, 1}}, 1};
    for (int it = 0; it < 500; ++it) {
      Vec x(2), t(1);
      x << un(rng), un(rng);
      t << 0.6 * un(rng);
      if (it % 10 == 0) x.setZero();
      if (it % 7 == 0) t.setZero();
      check_point("h21", g, ccdist::htype_distance(spec, x, t), {x, t}, true);
    }
  }
  {  // two-block generalized H-type, frequencies 0.5 and 1.0
    const Group g = ccdist::make_generalized_heisenberg({{0.5, 1}, {1.0, 1}});
    const ccdist::HTypeSpec spec{{{0.5, 1}, {1.0, 1}}, 1};
    for (int it = 0; it < 500; ++it) {
      Vec x(4), t(1);
      for (int i = 0; i < 4; ++i) x[i] = un(rng);
      t << 0.6 * un(rng);
      if (it % 5 == 0) x.tail(2).setZero();  // one block empty
      if (it % 10 == 0) x.setZero();
      if (it % 7 == 0) t.setZero();
      if (it % 9 == 0) t *= 4.0;  // deep vertical: cut branch
      check_point("htype2", g, ccdist::htype_distance(spec, x, t), {x, t},
                  true);
    }
  }
  {  // star graph K_{1,2}
    const Group g = ccdist::make_star(2);
    for (int it = 0; it < 500; ++it) {
      Vec x(3), t(2);
      for (int i = 0; i < 3; ++i) x[i] = un(rng);
      for (int i = 0; i < 2; ++i) t[i] = 0.5 * un(rng);
      switch (it % 5) {
        case 1: x[0] = 0.0; break;        // hub zero: cut region
        case 2: t.setZero(); break;       // first layer
        case 3: x.setZero(); break;       // vertical
        case 4: x.tail(2).setZero(); break;  // hub only
        default: break;
      }
      check_point("star", g, ccdist::star_distance(2, x, t), {x, t}, true);
    }
  }
  {  // N3,2: spread over all five dispatch regions
    const Group g = ccdist::make_n32();
    for (int it = 0; it < 500; ++it) {
      Vec x(3), t(3);
      for (int i = 0; i < 3; ++i) {
        x[i] = un(rng);
        t[i] = 0.4 * un(rng);
      }
      switch (it % 5) {
        case 0: x.setZero(); break;
        case 1: t.setZero(); break;
        case 3: {  // on the boundary curve
          const double a2 = x.squaredNorm();
          const double al = 0.3 + std::fabs(un(rng));
          const Vec xh = x / x.norm();
          Vec e2(3);
          e2 << -xh[1], xh[0], 0.0;
          if (e2.norm() < 0.3) e2 << 0.0, -xh[2], xh[1];
          e2.normalize();
          t = a2 / 4.0 * (al * al / kPi * xh + 2.0 * al / kPi * e2);
          break;
        }
        case 4: t = (0.3 + 0.5 * std::fabs(un(rng))) * x; break;  // parallel
        default: break;
      }
      // Equality with the generic maximizer holds exactly when the reduced
      // vertical part sits on or above the curve (or on the axes x=0, t=0).
      bool above_curve = true;
      if (x.norm() > 0.0 && t.norm() > 0.0) {
        const double a2 = x.squaredNorm();
        const double u1 = 4.0 * std::fabs(t.dot(x)) / (a2 * x.norm());
        const double u2 = 4.0 * (t - t.dot(x) / a2 * x).norm() / a2;
        above_curve = u2 >= curve_height(u1) - 1e-9;
      }
      check_point("n32", g, ccdist::n32_distance(x, t), {x, t}, above_curve);
    }
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  chk.require(elapsed < 60.0, "runtime %.1fs exceeds 60s", elapsed);
  return chk.failures == 0;
}

// ---------------------------------------------------------------------------
// Criterion 2: pinned special-configuration values.
//   d((x,0))^2 = |x|^2 on every family; d((0,t))^2 = 4 pi |t| on N3,2 and on
//   the star groups; d^2 = |x|^2 (1 + alpha^2) along the N3,2 boundary curve;
//   d^2 = 1 + 4 pi t2 for a unit leg of the star with vertical part (0, t2).
// Closed form to 1e-9, generic maximizer to 1e-6.
bool criterion2() {
  Check chk;
  const double tol_cf = 1e-9;
  const double tol_gen = 1e-6;

  auto check_value = [&](const char* name, const Group& g,
                         const ccdist::DistanceResult& cf, const Point& p,
                         double want) {
    chk.require(rel_gap(cf.d_squared, want) <= tol_cf,
                "%s closed form: got %.15g want %.15g", name, cf.d_squared,
                want);
    const auto gen = ccdist::distance_squared(g, p);
    chk.require(rel_gap(gen.d_squared, want) <= tol_gen,
                "%s generic: got %.15g want %.15g", name, gen.d_squared, want);
  };

  {  // first-layer points on all four families
    const Group g1 = ccdist::make_heisenberg(2);
    Vec x(2), t(1);
    x << 1.0, 0.3;
    t << 0.0;
    check_value("h21 (x,0)", g1,
                ccdist::htype_distance({{{1.0, 1}}, 1}, x, t), {x, t},
                x.squaredNorm());

    const Group g2 = ccdist::make_generalized_heisenberg({{0.5, 1}, {1.0, 1}});
    Vec x2(4), t2(1);
    x2 << 0.7, -0.2, 0.4, 0.1;
    t2 << 0.0;
    check_value("htype2 (x,0)", g2,
                ccdist::htype_distance({{{0.5, 1}, {1.0, 1}}, 1}, x2, t2),
                {x2, t2}, x2.squaredNorm());

    const Group g3 = ccdist::make_star(2);
    Vec x3(3), t3(2);
    x3 << 0.5, 1.0, -0.3;
    t3.setZero();
    check_value("star (x,0)", g3, ccdist::star_distance(2, x3, t3), {x3, t3},
                x3.squaredNorm());

    const Group g4 = ccdist::make_n32();
    Vec x4(3), t4(3);
    x4 << 0.8, -0.4, 0.3;
    t4.setZero();
    check_value("n32 (x,0)", g4, ccdist::n32_distance(x4, t4), {x4, t4},
                x4.squaredNorm());
  }
  {  // vertical points: d^2 = 4 pi |t|
    const Group g4 = ccdist::make_n32();
    Vec x(3), t(3);
    x.setZero();
    t << 0.3, -0.2, 0.5;
    check_value("n32 (0,t)", g4, ccdist::n32_distance(x, t), {x, t},
                4.0 * kPi * t.norm());

    const Group g3 = ccdist::make_star(2);
    Vec xs(3), ts(2);
    xs.setZero();
    ts << 0.25, -0.4;
    check_value("star (0,t)", g3, ccdist::star_distance(2, xs, ts), {xs, ts},
                4.0 * kPi * ts.norm());
  }
  {  // N3,2 boundary curve: d^2 = |x|^2 (1 + alpha^2), canonical and rotated
    const Group g = ccdist::make_n32();
    const Eigen::Matrix3d rot = tilted_rotation();
    for (double alpha : {0.5, 1.0, 2.0}) {
      const double a = 1.1;
      for (int rotated = 0; rotated < 2; ++rotated) {
        Eigen::Vector3d xh = Eigen::Vector3d::UnitX();
        Eigen::Vector3d e2 = Eigen::Vector3d::UnitY();
        if (rotated) {
          xh = rot * xh;
          e2 = rot * e2;
        }
        const Vec x = a * xh;
        const Vec t = a * a / 4.0 *
                      (alpha * alpha / kPi * xh + 2.0 * alpha / kPi * e2);
        char name[64];
        std::snprintf(name, sizeof name, "n32 curve alpha=%g%s", alpha,
                      rotated ? " rotated" : "");
        check_value(name, g, ccdist::n32_distance(x, t), {x, t},
                    a * a * (1.0 + alpha * alpha));
      }
    }
  }
  {  // star with one unit leg and vertical part (0, t2): d^2 = 1 + 4 pi t2
    const Group g = ccdist::make_star(2);
    Vec x(3);
    x << 0.0, 1.0, 0.0;
    for (double t2 : {0.25, 0.5, 1.0}) {
      Vec t(2);
      t << 0.0, t2;
      char name[32];
      std::snprintf(name, sizeof name, "star t2=%g", t2);
      check_value(name, g, ccdist::star_distance(2, x, t), {x, t},
                  1.0 + 4.0 * kPi * t2);
    }
  }
  return chk.failures == 0;
}

// ---------------------------------------------------------------------------
// Criterion 3: geodesic round trips.  Shoot a normal geodesic from a random
// covector whose vertical part stays inside the operator-norm ball, then feed
// the endpoint back to the maximizer: squared distance must equal |zeta0|^2
// to 1e-8 relative and the recovered vertical covector must match theta0 to
// 1e-6.
bool criterion3() {
  Check chk;
  const double tol_d2 = 1e-8;
  const double tol_theta = 1e-6;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const std::vector<Group> groups = {
      ccdist::make_heisenberg(2),
      ccdist::make_generalized_heisenberg({{0.5, 1}, {1.0, 1}}),
      ccdist::make_star(2), ccdist::make_n32()};
  for (const Group& g : groups) {
    for (int it = 0; it < 50; ++it) {
      Vec z(g.q()), th(g.m());
      for (Eigen::Index i = 0; i < g.q(); ++i) z[i] = un(rng);
      for (Eigen::Index i = 0; i < g.m(); ++i) th[i] = un(rng);
      z *= (0.5 + 1.5 * u01(rng)) / z.norm();
      const double target = (0.05 + 0.87 * u01(rng)) * kPi;
      th *= target / ccdist::operator_norm(g, th);

      const auto geo = ccdist::exp_map(g, ccdist::Covector{z, th});
      const auto gen = ccdist::distance_squared(g, geo.endpoint);
      const double l2 = z.squaredNorm();
      chk.require(rel_gap(gen.d_squared, l2) <= tol_d2,
                  "d2 mismatch: got %.12g want %.12g", gen.d_squared, l2);
      chk.require((gen.theta - th).norm() <= tol_theta * (1.0 + th.norm()),
                  "theta mismatch: |diff|=%.3g", (gen.theta - th).norm());
    }
  }
  return chk.failures == 0;
}

// ---------------------------------------------------------------------------
// Criterion 4: scalar-kernel inequality suite on 1000-point grids, with the
// ingredients on (pi, theta1) cross-checked against independently summed
// partial-fraction series, and theta1 re-derived by bisection.

// Series sums with explicit tail handling, all in long double.  For
//   S1(r) = sum_{j>=2} 1/((j pi)^2 - r^2)
// the tail beyond J is expanded in powers of (r/(j pi))^2 and folded into the
// exact zeta values sum j^-2 = pi^2/6 and sum j^-4 = pi^4/90, leaving a
// remainder below 1e-16 for J = 4000.  The squared and cubed series converge
// fast enough that plain truncation at J = 4000 is already below 1e-15.
struct SeriesSums {
  double s1, s2_all, s3_tail2;  // linear (j>=2), squared (j>=1), cubed (j>=2)
};
SeriesSums series_sums(double r) {
  const int J = 4000;
  const long double pi = std::acos(-1.0L);
  const long double r2 = static_cast<long double>(r) * r;
  long double s1 = 0.0L, s2 = 0.0L, s3 = 0.0L;
  long double h2 = 0.0L, h4 = 0.0L;  // partial zeta sums over 1..J
  for (int j = 1; j <= J; ++j) {
    const long double jp2 = (j * pi) * (j * pi);
    const long double d = jp2 - r2;
    if (j >= 2) {
      s1 += 1.0L / d;
      s3 += 1.0L / (d * d * d);
    }
    s2 += 1.0L / (d * d);
    h2 += 1.0L / (static_cast<long double>(j) * j);
    h4 += 1.0L / (static_cast<long double>(j) * j * j * j);
  }
  // 1/((j pi)^2 - r^2) = 1/(j pi)^2 + r^2/(j pi)^4 + r^4/((j pi)^4 ((j pi)^2 - r^2))
  const long double zeta2_tail = pi * pi / 6.0L - h2;
  const long double zeta4_tail = pi * pi * pi * pi / 90.0L - h4;
  long double tail = zeta2_tail / (pi * pi) + r2 * zeta4_tail / (pi * pi * pi * pi);
  {
    long double rem = 0.0L;  // fourth-order remainder, summed until negligible
    for (int j = J + 1; j <= J + 64; ++j) {
      const long double jp2 = (j * pi) * (j * pi);
      rem += r2 * r2 / (jp2 * jp2 * (jp2 - r2));
    }
    tail += rem;
  }
  s1 += tail;
  return {static_cast<double>(s1), static_cast<double>(s2),
          static_cast<double>(s3)};
}

bool criterion4() {
  Check chk;
  const double th1 = ccdist::theta1();

  // Inequalities on (0, pi): f'' > f'/r > 2 psi >= 2 psi(0) > 0,
  // psi'' > psi'/r > 0, and psi psi'' > 2 psi'^2.
  const double psi0 = ccdist::psi_kernel(0.0);
  chk.require(psi0 > 0.0, "psi(0) = %.6g not positive", psi0);
  for (int i = 0; i < 1000; ++i) {
    const double r = (i + 0.5) * kPi / 1000.0;
    const double f1 = ccdist::mu_kernel(r);       // f'
    const double f2 = ccdist::mu_prime(r);        // f''
    const double ps = ccdist::psi_kernel(r);
    const double p1 = ccdist::psi_d1(r);
    const double p2 = ccdist::psi_d2(r);
    chk.require(f2 > f1 / r, "f''<=f'/r at r=%.6f", r);
    chk.require(f1 / r > 2.0 * ps, "f'/r<=2psi at r=%.6f", r);
    chk.require(ps >= psi0, "psi below psi(0) at r=%.6f", r);
    chk.require(p2 > p1 / r, "psi''<=psi'/r at r=%.6f", r);
    chk.require(p1 / r > 0.0, "psi'/r<=0 at r=%.6f", r);
    chk.require(ps * p2 > 2.0 * p1 * p1, "psi*psi''<=2psi'^2 at r=%.6f", r);
  }
  // psi > sqrt(psi'/r) on [0, pi); at r = 0 the quotient tends to psi''(0).
  for (int i = 0; i < 1000; ++i) {
    const double r = i * (kPi - 1e-6) / 999.0;
    const double quot = r == 0.0 ? ccdist::psi_d2(0.0) : ccdist::psi_d1(r) / r;
    chk.require(ccdist::psi_kernel(r) > std::sqrt(quot),
                "psi<=sqrt(psi'/r) at r=%.6f", r);
  }

  // Signs and series identities on (pi, theta1):
  //   psi < 0, K1 = psi'/r > 0, K2 = (psi'' - psi'/r)/r^2 < 0,
  //   2 psi K2 - 4 K1^2 < 0,
  // and against the independent series,
  //   psi = -2 [ 1/(r^2-pi^2) - S1 ],  K1 = 4 S2,  K2 = -16 [ 1/(r^2-pi^2)^3 - S3 ].
  const double tol_series = 1e-9;
  for (int i = 0; i < 1000; ++i) {
    const double r = kPi + (i + 0.5) * (th1 - kPi) / 1000.0;
    const double ps = ccdist::psi_kernel(r);
    const auto kc = ccdist::k_constants(r, 0.0);
    chk.require(ps < 0.0, "psi>=0 at r=%.6f", r);
    chk.require(kc.k1 > 0.0, "K1<=0 at r=%.6f", r);
    chk.require(kc.k2 < 0.0, "K2>=0 at r=%.6f", r);
    chk.require(2.0 * ps * kc.k2 - 4.0 * kc.k1 * kc.k1 < 0.0,
                "2 psi K2 - 4 K1^2 >= 0 at r=%.6f", r);
    const auto s = series_sums(r);
    const double gap = 1.0 / (r * r - kPi * kPi);
    const double psi_series = -2.0 * (gap - s.s1);
    const double k1_series = 4.0 * s.s2_all;
    const double k2_series = -16.0 * (gap * gap * gap - s.s3_tail2);
    chk.require(rel_gap(ps, psi_series) <= tol_series,
                "psi series mismatch at r=%.6f: %.12g vs %.12g", r, ps,
                psi_series);
    chk.require(rel_gap(kc.k1, k1_series) <= tol_series,
                "K1 series mismatch at r=%.6f: %.12g vs %.12g", r, kc.k1,
                k1_series);
    chk.require(rel_gap(kc.k2, k2_series) <= tol_series,
                "K2 series mismatch at r=%.6f: %.12g vs %.12g", r, kc.k2,
                k2_series);
  }

  // theta1 by bisection of tan s - s on (pi + 0.5, 1.5 pi - 0.01), which
  // brackets the root and contains no pole of tan.
  {
    double lo = kPi + 0.5, hi = 1.5 * kPi - 0.01;
    auto fn = [](double s) { return std::tan(s) - s; };
    chk.require(fn(lo) < 0.0 && fn(hi) > 0.0, "bisection bracket invalid");
    while (hi - lo > 1e-14) {
      const double mid = 0.5 * (lo + hi);
      (fn(mid) < 0.0 ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    chk.require(root > 4.4933 && root < 4.4935,
                "root %.10f outside (4.4933, 4.4935)", root);
    chk.require(std::fabs(root - th1) <= 1e-12,
                "theta1() = %.15f but bisection gives %.15f", th1, root);
  }
  return chk.failures == 0;
}

// ---------------------------------------------------------------------------
// Criterion 5: at a critical vertical covector theta of the reference
// function, its value equals |U(theta)/sin U(theta) x|^2 to 1e-9 relative.
// 200 constructed critical points: 100 inside the operator-norm ball across
// the four families, plus 100 with theta beyond it (N3,2, the branch where
// the in-plane radius lies between pi and theta1).
bool criterion5() {
  Check chk;
  const double tol = 1e-9;
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  auto check_identity = [&](const Group& g, const Vec& x, const Vec& th) {
    const auto li = ccdist::critical_length_identity(g, x, th);
    chk.require(li.gap <= tol * (1.0 + li.phi_value),
                "identity gap %.3g at phi=%.6g", li.gap, li.phi_value);
  };

  const std::vector<Group> groups = {
      ccdist::make_heisenberg(2),
      ccdist::make_generalized_heisenberg({{0.5, 1}, {1.0, 1}}),
      ccdist::make_star(2), ccdist::make_n32()};
  for (const Group& g : groups) {
    for (int it = 0; it < 25; ++it) {
      Vec x(g.q()), th(g.m());
      for (Eigen::Index i = 0; i < g.q(); ++i) x[i] = un(rng);
      for (Eigen::Index i = 0; i < g.m(); ++i) th[i] = un(rng);
      x *= (0.5 + u01(rng)) / x.norm();
      th *= (0.05 + 0.90 * u01(rng)) * kPi / ccdist::operator_norm(g, th);
      check_identity(g, x, th);
    }
  }

  const Group n32 = ccdist::make_n32();
  const Eigen::Matrix3d rot = tilted_rotation();
  const double th1 = ccdist::theta1();
  for (int it = 0; it < 100; ++it) {
    const double a = 0.5 + 1.5 * u01(rng);
    const double r = kPi + 0.08 + (th1 - kPi - 0.16) * u01(rng);
    const double xi = 0.1 + 0.8 * u01(rng);
    const double cap = std::min(
        -2.0 * ccdist::psi_kernel(r) / (ccdist::psi_d1(r) / r),
        r * r - kPi * kPi);
    Eigen::Vector3d x(a, 0.0, 0.0);
    Eigen::Vector3d th(0.0, 0.0, 0.0);
    th[1] = -xi * std::sqrt(cap);
    th[0] = std::sqrt(r * r - th[1] * th[1]);
    if (it % 2) {  // same configuration in a rotated frame
      x = rot * x;
      th = rot * th;
    }
    check_identity(n32, Vec(x), Vec(th));
  }
  return chk.failures == 0;
}

// ---------------------------------------------------------------------------
// Criterion 6: the vertical-coordinate changes are numerical bijections.
// 200-point round trips through each map at 1e-10 absolute, and a negative
// finite-difference Jacobian determinant at every sample of the outer branch
// of the N3,2 map.  The grids stay slightly inside the regions so that the
// image magnitudes (and with them the Newton residual floor of the inverses)
// stay within the 1e-10 budget; near the rims |u| diverges and no inverse
// could do better in double precision.
bool criterion6() {
  Check chk;
  const double tol = 1e-10;

  // Star-group map on { tau1 > 0, |tau| < pi }.
  for (int i = 0; i < 20; ++i) {
    const double r = 0.3 + (0.9 * kPi - 0.3) * i / 19.0;
    for (int j = 0; j < 10; ++j) {
      const double ang = -1.1 + 2.2 * j / 9.0;
      const Eigen::Vector2d tau(r * std::cos(ang), r * std::sin(ang));
      const Eigen::Vector2d back =
          ccdist::star_upsilon_inverse(ccdist::star_upsilon(tau));
      chk.require((back - tau).norm() <= tol,
                  "upsilon round trip %.3g at r=%.3f ang=%.3f",
                  (back - tau).norm(), r, ang);
    }
  }

  // N3,2 map, inner branch (|v| < pi, v2 > 0).
  for (int i = 0; i < 20; ++i) {
    const double r = 0.15 + (0.85 * kPi - 0.15) * i / 19.0;
    for (int j = 0; j < 10; ++j) {
      const double ang = 0.3 + (kPi - 0.6) * j / 9.0;
      const Eigen::Vector2d v(r * std::cos(ang), r * std::sin(ang));
      const Eigen::Vector2d back = ccdist::n32_lambda_inverse(
          ccdist::n32_lambda(v, Region::OMEGA_PLUS), Region::OMEGA_PLUS);
      chk.require((back - v).norm() <= tol,
                  "lambda+ round trip %.3g at r=%.3f ang=%.3f",
                  (back - v).norm(), r, ang);
    }
  }

  // N3,2 map, outer branch (pi < |v| < theta1, v2 < 0 below the opposite-sign
  // cap), plus the sign of its Jacobian determinant there.
  const double th1 = ccdist::theta1();
  auto fd_lambda_det = [](const Eigen::Vector2d& v) {
    const double h = 1e-6;
    Eigen::Matrix2d J;
    for (int c = 0; c < 2; ++c) {
      Eigen::Vector2d vp = v, vm = v;
      vp[c] += h;
      vm[c] -= h;
      J.col(c) = (ccdist::n32_lambda(vp, Region::OMEGA_MINUS_4) -
                  ccdist::n32_lambda(vm, Region::OMEGA_MINUS_4)) /
                 (2.0 * h);
    }
    return J.determinant();
  };
  for (int i = 0; i < 20; ++i) {
    const double r = kPi + 0.10 + (th1 - kPi - 0.20) * i / 19.0;
    for (int j = 0; j < 10; ++j) {
      // xi -> 0 approaches the fold v2 = 0 where the Jacobian determinant
      // vanishes, so the inverse conditioning diverges; stay above 0.3.
      const double xi = 0.3 + 0.55 * j / 9.0;
      const double cap = std::min(
          -2.0 * ccdist::psi_kernel(r) / (ccdist::psi_d1(r) / r),
          r * r - kPi * kPi);
      Eigen::Vector2d v;
      v[1] = -xi * std::sqrt(cap);
      v[0] = std::sqrt(r * r - v[1] * v[1]);
      const Eigen::Vector2d back = ccdist::n32_lambda_inverse(
          ccdist::n32_lambda(v, Region::OMEGA_MINUS_4), Region::OMEGA_MINUS_4);
      chk.require((back - v).norm() <= tol,
                  "lambda- round trip %.3g at r=%.3f xi=%.3f",
                  (back - v).norm(), r, xi);
      const double det = fd_lambda_det(v);
      chk.require(det < 0.0, "lambda- Jacobian det %.3g >= 0 at r=%.3f xi=%.3f",
                  det, r, xi);
    }
  }
  return chk.failures == 0;
}

// ---------------------------------------------------------------------------
// Criterion 7: concavity and the lower-bound property of the reference
// function.  Its Hessian in the vertical variable is negative semidefinite at
// 200 random interior points, and for 200 geodesic endpoints the supremum
// over the operator-norm ball never exceeds the squared length that produced
// the endpoint, even when the shooting covector leaves that ball.
bool criterion7() {
  Check chk;
  const double tol = 1e-8;
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const std::vector<Group> groups = {
      ccdist::make_heisenberg(2),
      ccdist::make_generalized_heisenberg({{0.5, 1}, {1.0, 1}}),
      ccdist::make_star(2), ccdist::make_n32()};
  for (const Group& g : groups) {
    for (int it = 0; it < 50; ++it) {
      Vec x(g.q()), t(g.m()), tau(g.m());
      for (Eigen::Index i = 0; i < g.q(); ++i) x[i] = un(rng);
      for (Eigen::Index i = 0; i < g.m(); ++i) {
        t[i] = 0.4 * un(rng);
        tau[i] = un(rng);
      }
      tau *= (0.1 + 0.8 * u01(rng)) * kPi / ccdist::operator_norm(g, tau);
      const ccdist::Mat H = ccdist::hess_phi(g, {x, t}, tau);
      const Eigen::SelfAdjointEigenSolver<ccdist::Mat> es(H);
      const double scale = std::max(1.0, x.squaredNorm() + t.norm());
      chk.require(es.eigenvalues().maxCoeff() <= tol * scale,
                  "Hessian eigenvalue %.3g > 0", es.eigenvalues().maxCoeff());

      Vec z(g.q()), th(g.m());
      for (Eigen::Index i = 0; i < g.q(); ++i) z[i] = un(rng);
      for (Eigen::Index i = 0; i < g.m(); ++i) th[i] = un(rng);
      z *= (0.5 + 1.5 * u01(rng)) / z.norm();
      th *= (0.2 + 2.3 * u01(rng)) / ccdist::operator_norm(g, th);
      const auto geo = ccdist::exp_map(g, ccdist::Covector{z, th});
      const double l2 = z.squaredNorm();
      try {
        const auto mx = ccdist::maximize_phi(g, geo.endpoint);
        chk.require(mx.value <= l2 + tol * (1.0 + l2),
                    "sup phi %.12g exceeds squared length %.12g", mx.value, l2);
      } catch (const std::exception& e) {
        chk.require(false, "maximize_phi failed: %s", e.what());
      }
    }
  }
  return chk.failures == 0;
}

// ---------------------------------------------------------------------------
// Criterion 8: heat-kernel small-time validation on H(2,1).  At ten points
// with known squared distance, the intercept of the fit
//   -4h log p_h = d^2 + a h log(1/h) + b h
// over h in {1e-2, 3e-3, 1e-3, 3e-4, 1e-4} lands within 1% of d^2, in under
// five minutes total.
bool criterion8() {
  Check chk;
  const auto t_start = std::chrono::steady_clock::now();
  const Group g = ccdist::make_heisenberg(2);
  const std::vector<double> hs = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  const double thetas[10] = {0.0, 0.3, 0.7, 1.1, 1.5, 1.9, 2.2, 2.5, 2.7, 2.9};
  for (int k = 0; k < 10; ++k) {
    const double ts = thetas[k];
    const double beta = 0.41 * k;
    Vec x(2), t(1);
    x << std::cos(beta), std::sin(beta);
    t << ccdist::mu_kernel(ts) / 4.0;
    const double d2 = 4.0 * t[0] * ts + ccdist::s_cot_s(ts);
    const auto est = ccdist::varadhan_estimate(g, {x, t}, hs);
    chk.require(std::fabs(est.extrapolated - d2) <= 0.01 * d2,
                "point %d: extrapolated %.9g vs d2 %.9g", k, est.extrapolated,
                d2);
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  chk.require(elapsed < 300.0, "runtime %.1fs exceeds 300s", elapsed);
  return chk.failures == 0;
}

// ---------------------------------------------------------------------------
// Criterion 9: Hessian signature on the outer N3,2 branch.  At 50 points
// with vertical covector (v, 0), pi < |v| < theta1, the Hessian of the
// reference function has exactly two positive and one negative eigenvalue.
// The third vertical direction decouples (zero cross terms), and its
// curvature equals -|x|^2 K3 with K3 = 2 psi + (psi'/r) v2^2 < 0 there, so
// that single entry carries the K3 sign content; it must match to 1e-8
// relative.  (The negative eigenvalue itself lives in the (v1, v2) block.)
bool criterion9() {
  Check chk;
  const double tol_match = 1e-8;
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Group g = ccdist::make_n32();
  const double th1 = ccdist::theta1();
  for (int it = 0; it < 50; ++it) {
    const double a = 0.5 + 1.5 * u01(rng);
    const double r = kPi + 0.08 + (th1 - kPi - 0.16) * u01(rng);
    const double xi = 0.1 + 0.8 * u01(rng);
    const double cap = std::min(
        -2.0 * ccdist::psi_kernel(r) / (ccdist::psi_d1(r) / r),
        r * r - kPi * kPi);
    Vec v(2);
    v[1] = -xi * std::sqrt(cap);
    v[0] = std::sqrt(r * r - v[1] * v[1]);
    Vec x(3), th(3), t(3);
    x << a, 0.0, 0.0;
    th << v[0], v[1], 0.0;
    const Vec u = ccdist::n32_lambda(v, Region::OMEGA_MINUS_4);
    t << a * a / 4.0 * u[0], a * a / 4.0 * u[1], 0.0;

    const ccdist::Mat H = ccdist::hess_phi(g, {x, t}, th);
    const Eigen::SelfAdjointEigenSolver<ccdist::Mat> es(H);
    int npos = 0, nneg = 0;
    for (int i = 0; i < 3; ++i) {
      if (es.eigenvalues()[i] > 1e-8) ++npos;
      if (es.eigenvalues()[i] < -1e-8) ++nneg;
    }
    chk.require(npos == 2 && nneg == 1,
                "signature (%d+, %d-) at r=%.4f xi=%.2f", npos, nneg, r, xi);

    const auto kc = ccdist::k_constants(r, v[1]);
    chk.require(kc.k3 < 0.0, "K3 = %.6g not negative at r=%.4f", kc.k3, r);
    const double want = -a * a * kc.k3;
    chk.require(rel_gap(H(2, 2), want) <= tol_match,
                "third-direction curvature %.12g vs -|x|^2 K3 %.12g", H(2, 2),
                want);
    const double off = std::max(std::fabs(H(0, 2)), std::fabs(H(1, 2)));
    chk.require(off <= 1e-9 * (1.0 + std::fabs(want)),
                "third direction does not decouple: off-diagonal %.3g", off);
  }
  return chk.failures == 0;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;  // 0 = run everything
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (std::strncmp(argv[i], "--criterion=", 12) == 0) {
      only = std::atoi(argv[i] + 12);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion k]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > 9) {
    std::fprintf(stderr, "criterion must be in 1..9\n");
    return 2;
  }

  bool (*const criteria[9])() = {criterion1, criterion2, criterion3,
                                 criterion4, criterion5, criterion6,
                                 criterion7, criterion8, criterion9};
  int failed = 0;
  for (int k = 1; k <= 9; ++k) {
    if (only != 0 && k != only) continue;
    const bool ok = criteria[k - 1]();
    std::printf("CRITERION %d: %s\n", k, ok ? "PASS" : "FAIL");
    if (!ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
