#include "ccdist/reference.hpp"

#include <cmath>

namespace ccdist {
namespace {

void check_no_pole(const Spectrum& sp) {
  for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) {
    const double a = std::fabs(sp.eigenvalues[i]);
    const double k = std::nearbyint(a / M_PI);
    if (k >= 1.0 && std::fabs(a - k * M_PI) < 1e-11 * (1.0 + a))
      throw PoleAtEigenvalue(sp.eigenvalues[i]);
  }
}

// First divided difference of W(s) = s*cot(s).
double w_divided(double a, double b, double cluster_gap) {
  if (std::fabs(a - b) <= cluster_gap) return -mu_kernel(0.5 * (a + b));
  return (s_cot_s(a) - s_cot_s(b)) / (a - b);
}

double default_step(const Vec& tau) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + tau.norm());
}

}  // namespace

double phi(const Group& g, const Point& p, const Vec& tau) {
  check_point(g, p);
  const Spectrum sp = spectrum(g, tau);
  check_no_pole(sp);
  const CVec y = sp.basis.adjoint() * p.x.cast<Complex>();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    acc += s_cot_s(sp.eigenvalues[i]) * std::norm(y[i]);
  return acc + 4.0 * p.t.dot(tau);
}

Vec grad_phi(const Group& g, const Point& p, const Vec& tau) {
  check_point(g, p);
  const Spectrum sp = spectrum(g, tau);
  check_no_pole(sp);
  const Eigen::Index q = g.q(), m = g.m();
  const CVec y = sp.basis.adjoint() * p.x.cast<Complex>();
  const double maxabs = sp.eigenvalues.size() ? sp.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double cluster_gap = 1e-8 * (1.0 + maxabs);

  Mat dd(q, q);
  for (Eigen::Index a = 0; a < q; ++a)
    for (Eigen::Index b = 0; b <= a; ++b) {
      dd(a, b) = w_divided(sp.eigenvalues[a], sp.eigenvalues[b], cluster_gap);
      dd(b, a) = dd(a, b);
    }

  Vec grad(m);
  const Complex iunit(0.0, 1.0);
  for (Eigen::Index k = 0; k < m; ++k) {
    const CMat Mk = sp.basis.adjoint() * (iunit * g.generator(k).cast<Complex>()) * sp.basis;
    double acc = 0.0;
    for (Eigen::Index a = 0; a < q; ++a)
      for (Eigen::Index b = 0; b < q; ++b)
        acc += dd(a, b) * std::real(std::conj(y[a]) * Mk(a, b) * y[b]);
    grad[k] = acc + 4.0 * p.t[k];
  }
  return grad;
}

Mat hess_phi(const Group& g, const Point& p, const Vec& tau, double step) {
  const Eigen::Index m = g.m();
  Mat H(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    Vec tp = tau, tm = tau;
    tp[k] += step;
    tm[k] -= step;
    H.col(k) = (grad_phi(g, p, tp) - grad_phi(g, p, tm)) / (2.0 * step);
  }
  return 0.5 * (H + H.transpose());
}

Mat hess_phi(const Group& g, const Point& p, const Vec& tau) {
  return hess_phi(g, p, tau, default_step(tau));
}

PhiEval phi_eval(const Group& g, const Point& p, const Vec& tau) {
  return {phi(g, p, tau), grad_phi(g, p, tau), hess_phi(g, p, tau)};
}

double hess_quadratic_series(const Group& g, const Vec& x, const Vec& tau,
                             const Vec& v, int terms) {
  g.check_horizontal(x);
  g.check_vertical(v);
  const Spectrum sp = spectrum(g, tau);
  // The partial-fraction expansion converges wherever no eigenvalue sits on a
  // pole of s*cot(s), i.e. on the whole good set, not just Omega*.
  if (!in_good_set(g, sp)) throw DomainError("hess_quadratic_series needs tau in the good set");

  const CVec y = sp.basis.adjoint() * x.cast<Complex>();
  const Complex iunit(0.0, 1.0);
  const CMat Mv = sp.basis.adjoint() * (iunit * g.u_tilde(v).cast<Complex>()) * sp.basis;
  const CVec z_inf = Mv * y;  // U(v) x in the eigenbasis
  const double bracket_inf = 2.0 * z_inf.squaredNorm();

  double acc = 0.0;
  const Eigen::Index q = g.q();
  CVec scaled(q), z(q);
  for (int j = 1; j <= terms; ++j) {
    const double jp = j * M_PI;
    double bracket = 0.0;
    for (const double sgn : {1.0, -1.0}) {
      for (Eigen::Index i = 0; i < q; ++i)
        scaled[i] = y[i] / (1.0 - sgn * sp.eigenvalues[i] / jp);
      z = Mv * scaled;
      for (Eigen::Index i = 0; i < q; ++i)
        bracket += std::norm(z[i]) / (1.0 - sgn * sp.eigenvalues[i] / jp);
    }
    acc += bracket / (jp * jp);
  }
  // Tail: brackets tend to 2 |U(v) x|^2; sum_{j>J} j^-2 via Euler-Maclaurin.
  const double J = terms;
  const double ztail = 1.0 / J - 1.0 / (2.0 * J * J) + 1.0 / (6.0 * J * J * J);
  acc += bracket_inf * ztail / (M_PI * M_PI);
  return -2.0 * acc;
}

DegeneracyReport degeneracy_test(const Group& g, const Point& p, const Vec& theta,
                                 const Vec& v) {
  check_point(g, p);
  g.check_vertical(v);
  const double scale = critical_scale(p);
  const double gnorm = grad_phi(g, p, theta).norm();
  if (gnorm > 1e-8 * scale) throw NotACriticalPoint(gnorm, 1e-8 * scale);

  DegeneracyReport rep;
  rep.direction = v;
  rep.hess_quadratic = v.dot(hess_phi(g, p, theta) * v);
  rep.t_dot_v = p.t.dot(v);
  rep.t_orthogonal = std::fabs(rep.t_dot_v) <= 1e-8 * (1.0 + p.t.norm()) * (1.0 + v.norm());

  const Mat Uv = g.u_tilde(v);
  const Mat Ut = g.u_tilde(theta);
  const double uv_scale = Uv.norm();
  Vec w = p.x;
  rep.kernel_chain_ok = true;
  for (Eigen::Index j = 0; j < g.q(); ++j) {
    if ((Uv * w).norm() > 1e-8 * (uv_scale * w.norm() + p.x.norm())) {
      rep.kernel_chain_ok = false;
      break;
    }
    w = Ut * w;
  }
  return rep;
}

}  // namespace ccdist
