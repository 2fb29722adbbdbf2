#include "ccdist/selftest.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ccdist/closed_form.hpp"
#include "ccdist/geodesics.hpp"
#include "ccdist/group.hpp"
#include "ccdist/group_io.hpp"
#include "ccdist/heat_kernel.hpp"
#include "ccdist/reference.hpp"
#include "ccdist/scalar_kernels.hpp"
#include "ccdist/solver.hpp"

namespace ccdist {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct Harness {
  SelfTestReport* rep;
  std::string suite;
  int local = 0;
  int local_fail = 0;

  void check(bool ok, const std::string& what) {
    ++rep->checks;
    ++local;
    if (!ok) {
      ++local_fail;
      rep->failures.push_back(suite + ": " + what);
    }
  }
  void near(double a, double b, double tol, const std::string& what) {
    std::ostringstream os;
    os << what << " (got " << a << ", want " << b << ")";
    check(std::abs(a - b) <= tol * (1.0 + std::abs(b)), os.str());
  }
};

void run_suite(SelfTestReport& rep, const std::string& name,
               const std::function<void(Harness&)>& body) {
  Harness h{&rep, name, 0, 0};
  try {
    body(h);
  } catch (const std::exception& e) {
    ++h.local_fail;
    rep.failures.push_back(name + ": unexpected exception: " + e.what());
  }
  std::ostringstream line;
  if (h.local_fail == 0)
    line << name << ": ok (" << h.local << " checks)";
  else
    line << name << ": FAIL (" << h.local_fail << " failed of " << h.local
         << " checks)";
  rep.lines.push_back(line.str());
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Vec vec1(double a) {
  Vec v(1);
  v << a;
  return v;
}

void suite_scalar(Harness& h) {
  h.near(mu_kernel(0.5 * kPi), 0.5 * kPi, 1e-14, "mu at pi/2");
  h.near(s_cot_s(1.0), std::cos(1.0) / std::sin(1.0), 1e-14, "s*cot(s) at 1");
  h.near(psi_kernel(4.0), -0.15342272, 1e-6, "psi at 4");
  const double th1 = theta1();
  h.check(th1 > kPi && th1 < 1.5 * kPi, "theta1 bracket");
  h.near(std::tan(th1), th1, 1e-9, "tan(theta1) = theta1");
  for (double r : {0.03, 0.4, 1.3, 2.8, 3.6, 5.1}) {
    h.near(mu_kernel(r), 2.0 * r * psi_kernel(r) + r * r * psi_d1(r), 1e-10,
           "mu identity at r=" + std::to_string(r));
  }
  for (double r : {0.03, 0.4, 1.3, 2.4, 2.9, 3.1}) {  // mu is monotone on (0, pi)
    h.near(mu_prime(r) > 0.0 ? 1.0 : 0.0, 1.0, 0.0,
           "mu increasing at r=" + std::to_string(r));
  }
  for (double y : {0.05, 0.8, 3.0, 40.0, 1e4}) {
    h.near(mu_kernel(mu_inverse(y)), y, 1e-10,
           "mu round trip at y=" + std::to_string(y));
  }
}

void suite_group(Harness& h) {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (const auto& g : {make_heisenberg(2), make_star(2), make_n32()}) {
    Vec tau(g.m());
    for (Eigen::Index i = 0; i < tau.size(); ++i) tau[i] = 0.6 * uni(rng);
    const Mat ut = g.u_tilde(tau);
    h.near((ut + ut.transpose()).norm(), 0.0, 1e-14, "u_tilde skew");
    const Spectrum sp = spectrum(g, tau);
    h.near(operator_norm(g, tau), sp.eigenvalues.cwiseAbs().maxCoeff(), 1e-12,
           "operator norm vs spectrum");
    Vec x(g.q()), t(g.m());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = uni(rng);
    for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = 0.3 * uni(rng);
    const Point p{x, t};
    // quadratic/linear homogeneity under dilation
    const double r = 1.7;
    h.near(phi(g, dilate(p, r), tau), r * r * phi(g, p, tau), 1e-12,
           "phi dilation homogeneity");
    // spectral transform against the reference function's quadratic part
    const Vec y = apply_fn(sp, KernelName::S_COT_S, x);
    h.near(x.dot(y), phi(g, p, tau) - 4.0 * t.dot(tau), 1e-10,
           "apply_fn consistency with phi");
  }
}

void suite_reference(Harness& h) {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (const auto& g : {make_heisenberg(4), make_star(2)}) {
    Vec x(g.q()), t(g.m()), tau(g.m());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = uni(rng);
    for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = 0.25 * uni(rng);
    for (Eigen::Index i = 0; i < tau.size(); ++i) tau[i] = 0.5 * uni(rng);
    const Point p{x, t};
    const Vec grad = grad_phi(g, p, tau);
    const double fd_step = 1e-6;
    for (Eigen::Index k = 0; k < tau.size(); ++k) {
      Vec e = Vec::Zero(tau.size());
      e[k] = fd_step;
      const double fd =
          (phi(g, p, tau + e) - phi(g, p, tau - e)) / (2.0 * fd_step);
      h.near(grad[k], fd, 1e-5, "grad_phi vs divided difference");
    }
    const Mat hess = hess_phi(g, p, tau);
    const Eigen::SelfAdjointEigenSolver<Mat> es(hess);
    h.check(es.eigenvalues().maxCoeff() <= 1e-6,
            "hessian negative semidefinite inside Omega*");
    Vec v(tau.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uni(rng);
    h.near(hess_quadratic_series(g, x, tau, v), v.dot(hess * v),
           1e-5 * (1.0 + v.squaredNorm()), "hessian series vs finite difference");
  }
}

void suite_geodesics(Harness& h) {
  const Group heis = make_heisenberg(2);
  {
    const LengthIdentity li =
        critical_length_identity(heis, vec2(1.0, 0.0), vec1(0.5 * kPi));
    h.near(li.length_sq, 0.25 * kPi * kPi, 1e-10, "H(2,1) length at theta=pi/2");
    h.near(li.gap, 0.0, 1e-9, "H(2,1) length identity gap");
    h.near(li.endpoint.t[0], 0.125 * kPi, 1e-10, "H(2,1) endpoint t");
  }
  {
    const Group star = make_star(2);
    const Vec x = vec3(0.4, 0.8, -0.3);
    const Vec theta = vec2(0.9, -0.4);
    const LengthIdentity li = critical_length_identity(star, x, theta);
    h.near(li.gap, 0.0, 1e-8, "star length identity gap");
    const Covector cv = initial_velocity(star, x, theta);
    const Geodesic geo = exp_map(star, cv, 8);
    h.near(geo.length * geo.length, cv.zeta0.squaredNorm(), 1e-10,
           "arc length equals |zeta0|");
    h.near((geo.endpoint.x - x).norm(), 0.0, 1e-9, "endpoint x hit");
  }
}

void suite_solver(Harness& h) {
  const Group heis = make_heisenberg(2);
  {
    const DistanceResult r =
        distance_squared(heis, Point{vec2(1.0, 0.0), vec1(0.125 * kPi)});
    h.near(r.d_squared, 0.25 * kPi * kPi, 1e-9, "H(2,1) distance example");
    h.near(r.theta[0], 0.5 * kPi, 1e-6, "H(2,1) maximizer");
    h.check(r.certificate == Certificate::EXACT_STATIONARY,
            "H(2,1) interior certificate");
  }
  {
    const DistanceResult r =
        distance_squared(heis, Point{vec2(0.0, 0.0), vec1(1.0)});
    h.near(r.d_squared, 4.0 * kPi, 1e-8, "vertical axis value");
    h.check(r.location == MaxLocation::BOUNDARY, "vertical axis is a sup");
  }
  // generic maximizer against the closed form on an anisotropic group
  const HTypeSpec spec{{{0.5, 1}, {1.0, 1}}, 1};
  const Group aniso = make_generalized_heisenberg({{0.5, 1}, {1.0, 1}});
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int k = 0; k < 4; ++k) {
    Vec x(4);
    for (Eigen::Index i = 0; i < 4; ++i) x[i] = uni(rng);
    const Vec t = vec1(0.4 * uni(rng));
    const DistanceResult num = distance_squared(aniso, Point{x, t});
    const DistanceResult cf = htype_distance(spec, x, t);
    h.near(num.d_squared, cf.d_squared, 1e-8, "solver vs closed form");
  }
}

void suite_closed_form(Harness& h) {
  h.check(hurwitz_radon(2) == 2 && hurwitz_radon(4) == 4 && hurwitz_radon(16) == 9,
          "hurwitz-radon values");
  {
    const DistanceResult r = star_distance(2, vec3(0.0, 1.0, 0.0), vec2(0.0, 0.5));
    h.near(r.d_squared, 1.0 + 2.0 * kPi, 1e-12, "star cut value");
    h.check(r.on_cut_locus.value_or(false), "star cut membership");
  }
  {
    const DistanceResult r = n32_distance(
        vec3(1.0, 0.0, 0.0), vec3(0.25 / kPi, 0.5 / kPi, 0.0));
    h.near(r.d_squared, 2.0, 1e-10, "n32 boundary curve value");
    h.check(r.location == MaxLocation::BOUNDARY, "n32 boundary curve location");
  }
  {
    const DistanceResult r =
        n32_distance(vec3(1.0, 0.0, 0.0), vec3(0.0, 0.125 * kPi, 0.0));
    h.near(r.d_squared, 0.25 * kPi * kPi, 1e-10, "n32 Heisenberg sub-case");
  }
  {
    const Eigen::Vector2d u(mu_kernel(1.0), 0.0);
    const Eigen::Vector2d tau = star_upsilon_inverse(u);
    h.near(tau[0], 1.0, 1e-10, "upsilon inverse on the axis");
    const Eigen::Vector2d back = star_upsilon(tau);
    h.near((back - u).norm(), 0.0, 1e-10, "upsilon round trip");
  }
  {
    const Eigen::Vector2d v =
        n32_lambda_inverse(Eigen::Vector2d(0.0, 0.5 * kPi), Region::OMEGA_PLUS);
    h.near(v[0], 0.0, 1e-12, "lambda inverse axis, first component");
    h.near(v[1], 0.5 * kPi, 1e-10, "lambda inverse axis, second component");
  }
}

void suite_heat(Harness& h) {
  const Group heis = make_heisenberg(2);
  h.near(v_factor(heis, vec1(0.0)), 1.0, 1e-14, "V(0) = 1");
  h.near(v_factor(heis, vec1(1.0)), 1.0 / std::sinh(1.0), 1e-13,
         "V on the real axis");
  {
    const Complex w(0.7, 0.5);
    const Complex want = w / std::sinh(w);
    const Complex got = v_factor_shifted(heis, vec1(0.5), vec1(0.7));
    h.near(std::abs(got - want), 0.0, 1e-12, "shifted V closed form");
  }
  {
    // decay bound on the shifted plane
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int k = 0; k < 5; ++k) {
      const double th = 0.4 + 0.2 * k;
      const double lam = uni(rng);
      const double lhs = std::abs(v_factor_shifted(heis, vec1(th), vec1(lam)));
      const double rhs =
          std::abs(v_factor_shifted(heis, vec1(th), vec1(0.0))) *
          v_factor(heis, vec1(lam));
      h.check(lhs <= rhs * (1.0 + 1e-10), "shifted V decay bound");
    }
  }
  {
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-10;
    const double p0 = heat_kernel(heis, Point{vec2(0.0, 0.0), vec1(0.0)}, 1.0, cfg);
    h.near(p0, 0.5 * kPi * kPi, 1e-8, "heat kernel at the origin");
    const Point gp{vec2(0.7, -0.2), vec1(0.3)};
    const Point gm{vec2(0.7, -0.2), vec1(-0.3)};
    h.near(heat_kernel(heis, gp, 1.0), heat_kernel(heis, gm, 1.0), 1e-8,
           "vertical reflection symmetry");
    QuadratureConfig c1 = cfg, c2 = cfg;
    c1.contour_shift = vec1(0.3);
    c2.contour_shift = vec1(1.1);
    h.near(heat_kernel(heis, gp, 0.7, c1), heat_kernel(heis, gp, 0.7, c2), 1e-8,
           "contour invariance");
  }
}

}  // namespace

SelfTestReport run_selftest() {
  SelfTestReport rep;
  run_suite(rep, "scalar-kernels", suite_scalar);
  run_suite(rep, "group-core", suite_group);
  run_suite(rep, "reference", suite_reference);
  run_suite(rep, "geodesics", suite_geodesics);
  run_suite(rep, "solver", suite_solver);
  run_suite(rep, "closed-form", suite_closed_form);
  run_suite(rep, "heat-kernel", suite_heat);
  return rep;
}

}  // namespace ccdist
