#include "ccdist/heat_kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ccdist/errors.hpp"
#include "ccdist/parallel.hpp"
#include "ccdist/quadrature.hpp"
#include "ccdist/solver.hpp"

namespace ccdist {
namespace {

constexpr double kPi = 3.14159265358979323846;

// z*coth(z).  Even and analytic for |Im z| < pi, which is where every
// argument below lives (the imaginary parts of the tube eigenvalues are
// bounded by the vertical operator norm of the shift).
Complex z_coth_z(const Complex& z) {
  const double a = std::abs(z);
  if (a < 0.1) {
    const Complex z2 = z * z;
    return 1.0 + z2 * (1.0 / 3.0 + z2 * (-1.0 / 45.0 +
                       z2 * (2.0 / 945.0 - z2 / 4725.0)));
  }
  const Complex w = z.real() < 0.0 ? -z : z;  // Re w >= 0 keeps exp bounded
  const Complex e = std::exp(-2.0 * w);
  return w * (1.0 + e) / (1.0 - e);
}

// u/sinh(u) on the same strip.
Complex u_over_sinh_u(const Complex& u) {
  const double a = std::abs(u);
  if (a < 0.1) {
    const Complex u2 = u * u;
    return 1.0 + u2 * (-1.0 / 6.0 + u2 * (7.0 / 360.0 +
                       u2 * (-31.0 / 15120.0 + u2 * (127.0 / 604800.0))));
  }
  const Complex w = u.real() < 0.0 ? -u : u;
  const Complex e = std::exp(-2.0 * w);
  return 2.0 * w * std::exp(-w) / (1.0 - e);
}

// One factor u/sinh(u) per +/- eigenvalue pair of a complex skew-symmetric
// matrix, zeros contributing 1.  Because the spectrum of such a matrix is
// symmetric under negation, this product is a continuous (indeed analytic)
// square root of det(U/sinh U); it agrees with the positive root at the real
// points, so it is the branch that tracks continuously from lambda = 0.
Complex pair_product(const CVec& u, Eigen::Index q) {
  const double scale = 1.0 + (u.size() > 0 ? u.cwiseAbs().maxCoeff() : 0.0);
  const double tol = 1e-9 * scale;
  Complex out(1.0, 0.0);
  Eigen::Index picked = 0;
  Eigen::Index zeros = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const Complex ui = u[i];
    if (std::abs(ui) <= tol) {
      ++zeros;
      continue;
    }
    if (ui.real() > tol || (std::abs(ui.real()) <= tol && ui.imag() > 0.0)) {
      out *= u_over_sinh_u(ui);
      ++picked;
    }
  }
  if (2 * picked + zeros != q)
    throw BranchTrackingFailure(
        "could not pair the tube eigenvalues into +/- couples (" +
        std::to_string(picked) + " picked, " + std::to_string(zeros) +
        " null of " + std::to_string(q) + ")");
  return out;
}

// Joint evaluator for the complex reference function and the determinant
// square root on the shifted plane i*shift + lambda.  For a single vertical
// direction the operator pencil is a fixed Hermitian matrix times a complex
// scalar, so one eigendecomposition serves every lambda; otherwise each
// evaluation diagonalizes the (complex skew-symmetric) operator directly.
class TubeIntegrand {
 public:
  TubeIntegrand(const Group& group, const Point& g, const Vec& shift)
      : group_(group), q_(group.q()), shift_(shift), x_(g.x) {
    t4_ = 4.0 * g.t;
    t_dot_shift4_ = t4_.dot(shift);
    if (group.m() == 1) {
      fast_ = true;
      Vec e1(1);
      e1[0] = 1.0;
      const Spectrum sp = spectrum(group, e1);
      rho_ = sp.eigenvalues;
      const CVec y = sp.basis.adjoint() * x_.cast<Complex>();
      weight_ = y.cwiseAbs2();
      rho_tol_ = 1e-12 * (1.0 + rho_.cwiseAbs().maxCoeff());
    } else {
      ut_shift_ = group.u_tilde(shift);
      xc_ = x_.cast<Complex>();
    }
  }

  // Returns {phi_tilde(g; i*shift + lambda), V(i*shift + lambda)}.
  std::pair<Complex, Complex> eval(const Vec& lambda) const {
    if (fast_) {
      const Complex w(lambda[0], shift_[0]);
      Complex phi(t_dot_shift4_, -t4_[0] * lambda[0]);
      Complex v(1.0, 0.0);
      for (Eigen::Index j = 0; j < q_; ++j) {
        const double r = rho_[j];
        if (weight_[j] != 0.0) phi += weight_[j] * z_coth_z(w * r);
        if (r > rho_tol_) v *= u_over_sinh_u(w * r);
      }
      return {phi, v};
    }
    CMat M = (-ut_shift_).cast<Complex>();
    M += Complex(0.0, 1.0) * group_.u_tilde(lambda).cast<Complex>();
    Eigen::ComplexEigenSolver<CMat> es(M, true);
    if (es.info() != Eigen::Success)
      throw NonConvergence(0, 0.0);
    const CVec& u = es.eigenvalues();
    const CMat& P = es.eigenvectors();
    const CVec z = P.colPivHouseholderQr().solve(xc_);
    if (z.norm() > 1e12 * (1.0 + xc_.norm()))
      throw QuadratureFailure(
          "tube eigenbasis is numerically defective at this quadrature node");
    CVec fz(q_);
    for (Eigen::Index j = 0; j < q_; ++j) fz[j] = z_coth_z(u[j]) * z[j];
    // Bilinear pairing; .dot conjugates its left argument, which is real here.
    const Complex quad = xc_.dot(P * fz);
    const Complex phi = quad + Complex(t_dot_shift4_, -t4_.dot(lambda));
    if (!std::isfinite(phi.real()) || !std::isfinite(phi.imag()))
      throw QuadratureFailure(
          "reference transform is non-finite on the shifted plane");
    return {phi, pair_product(u, q_)};
  }

 private:
  const Group& group_;
  Eigen::Index q_;
  Vec shift_;
  Vec x_;
  Vec t4_;
  double t_dot_shift4_ = 0.0;
  bool fast_ = false;
  Vec rho_;      // eigenvalues of the Hermitian vertical operator (m == 1)
  Vec weight_;   // squared moduli of x in that eigenbasis
  double rho_tol_ = 0.0;
  Mat ut_shift_;
  CVec xc_;
};

// Symmetric breakpoints of [-R, R], geometrically graded toward the origin so
// the central panel is no wider than w0.  The integrand always peaks at
// lambda = 0 (its modulus is maximal there), so anchoring the finest root
// panel at the origin guarantees the adaptive pass cannot overlook the peak.
std::vector<std::array<double, 2>> graded_segments(double R, double w0) {
  std::vector<double> b;
  for (double w = std::min(w0, R); w < R; w *= 4.0) b.push_back(w);
  b.push_back(R);
  std::vector<std::array<double, 2>> segs;
  for (std::size_t k = b.size(); k-- > 0;)
    segs.push_back({-b[k], k > 0 ? -b[k - 1] : 0.0});
  for (std::size_t k = 0; k < b.size(); ++k)
    segs.push_back({k > 0 ? b[k - 1] : 0.0, b[k]});
  return segs;
}

using Line = std::function<Complex(double)>;
using PlaneFn = std::function<Complex(const Vec&)>;

Complex crude_line(const Line& f, const std::vector<std::array<double, 2>>& segs) {
  Complex acc(0.0, 0.0);
  for (const auto& s : segs) acc += gk15<Complex>(f, s[0], s[1]).integral;
  return acc;
}

Complex adaptive_line(const Line& f, const std::vector<std::array<double, 2>>& segs,
                      double tol, int max_level, bool parallel) {
  const double seg_tol = tol / static_cast<double>(segs.size());
  std::vector<Complex> parts;
  if (parallel) {
    parts = parallel_map<Complex>(segs.size(), [&](std::size_t i) {
      return gk_adaptive<Complex>(f, segs[i][0], segs[i][1], seg_tol, max_level);
    });
  } else {
    parts.reserve(segs.size());
    for (const auto& s : segs)
      parts.push_back(gk_adaptive<Complex>(f, s[0], s[1], seg_tol, max_level));
  }
  Complex acc(0.0, 0.0);
  for (const Complex& p : parts) acc += p;
  return acc;
}

Complex crude_plane(const PlaneFn& f, const std::vector<std::array<double, 2>>& segs) {
  Complex acc(0.0, 0.0);
  for (const auto& outer : segs) {
    auto outer_f = [&](double l2) -> Complex {
      auto line = [&](double l1) -> Complex {
        Vec l(2);
        l << l1, l2;
        return f(l);
      };
      return crude_line(line, segs);
    };
    acc += gk15<Complex>(outer_f, outer[0], outer[1]).integral;
  }
  return acc;
}

Complex adaptive_plane(const PlaneFn& f, double R,
                       const std::vector<std::array<double, 2>>& segs,
                       double tol, int max_level) {
  // Inner integrals are absolute-tolerance evaluations of the outer
  // integrand; their noise budget must stay below what the outer refinement
  // asks of any panel, and the graded widths keep that ratio fixed in depth.
  const double inner_tol = tol / (64.0 * std::max(R, 1.0));
  const double inner_seg_tol = inner_tol / static_cast<double>(segs.size());
  const double outer_seg_tol = 0.5 * tol / static_cast<double>(segs.size());
  auto parts = parallel_map<Complex>(segs.size(), [&](std::size_t i) {
    auto outer_f = [&](double l2) -> Complex {
      auto line = [&](double l1) -> Complex {
        Vec l(2);
        l << l1, l2;
        return f(l);
      };
      Complex acc(0.0, 0.0);
      for (const auto& s : segs)
        acc += gk_adaptive<Complex>(line, s[0], s[1], inner_seg_tol, max_level);
      return acc;
    };
    return gk_adaptive<Complex>(outer_f, segs[i][0], segs[i][1], outer_seg_tol,
                                max_level);
  });
  Complex acc(0.0, 0.0);
  for (const Complex& p : parts) acc += p;
  return acc;
}

// Truncation radius: grow R until the integrand modulus on the sphere of
// radius R, multiplied by the crude volume factor (2R)^m, drops two orders
// below the requested tolerance.  The probe includes the exponential factor,
// so small h shrinks the box automatically.
double pick_radius(const PlaneFn& f, Eigen::Index m, double v0,
                   const QuadratureConfig& cfg) {
  std::vector<Vec> dirs;
  if (m == 1) {
    Vec d(1);
    d[0] = 1.0;
    dirs.push_back(d);
    dirs.push_back(-d);
  } else {
    for (int k = 0; k < 8; ++k) {
      Vec d(2);
      d << std::cos(0.25 * kPi * k), std::sin(0.25 * kPi * k);
      dirs.push_back(d);
    }
  }
  const double floor_tail = 0.01 * (cfg.abs_tol + cfg.rel_tol * v0);
  double R = 4.0;
  for (;;) {
    double worst = 0.0;
    for (const Vec& d : dirs) worst = std::max(worst, std::abs(f(R * d)));
    if (worst * std::pow(2.0 * R, static_cast<double>(m)) <= floor_tail) break;
    R *= 1.35;
    if (R > 1.0e5)
      throw QuadratureFailure(
          "shifted integrand shows no tail decay; truncation radius search "
          "failed");
  }
  return R * cfg.radius_scale;
}

// The requested relative tolerance must be anchored to the true magnitude of
// the integral, which a heavily oscillatory integrand can hide from the crude
// scan.  Re-anchor and re-run until the target stabilizes.
Complex integrate_tube(const PlaneFn& f, Eigen::Index m, double R, double w0,
                       const QuadratureConfig& cfg) {
  const auto segs = graded_segments(R, w0);
  Complex crude;
  Line line1;
  if (m == 1) {
    line1 = [&](double s) -> Complex {
      Vec l(1);
      l[0] = s;
      return f(l);
    };
    crude = crude_line(line1, segs);
  } else {
    crude = crude_plane(f, segs);
  }
  double tol = cfg.abs_tol + cfg.rel_tol * std::abs(crude);
  Complex q(0.0, 0.0);
  for (int pass = 0; pass < 8; ++pass) {
    q = m == 1 ? adaptive_line(line1, segs, tol, cfg.max_level, true)
               : adaptive_plane(f, R, segs, tol, cfg.max_level);
    const double next = cfg.abs_tol + cfg.rel_tol * std::abs(q);
    if (next >= 0.5 * tol) break;
    tol = next;
  }
  return q;
}

Vec resolve_shift(const Group& group, const Point& g, const QuadratureConfig& cfg) {
  const Eigen::Index m = group.m();
  if (cfg.contour_shift.size() != 0) {
    if (cfg.contour_shift.size() != m)
      throw DimensionMismatch("contour shift has size " +
                              std::to_string(cfg.contour_shift.size()) +
                              ", expected " + std::to_string(m));
    if (!in_omega_star(group, cfg.contour_shift))
      throw DomainError(
          "contour shift must keep the vertical operator norm below pi");
    return cfg.contour_shift;
  }
  const DistanceResult dr = distance_squared(group, g);
  Vec shift = dr.theta;
  if (shift.size() != m) shift = Vec::Zero(m);
  const double s = operator_norm(group, shift);
  if (s >= 0.99 * kPi) shift *= 0.99 * kPi / s;
  return shift;
}

struct KernelParts {
  double k_ref;   // reference-function value at the shift (exponential scale)
  double q_re;    // real part of the normalized tube integral
  double inv4h;
};

KernelParts evaluate_kernel(const Group& group, const Point& g, double h,
                            const QuadratureConfig& cfg) {
  if (group.m() > 2)
    throw DomainError(
        "heat-kernel quadrature supports vertical dimension m <= 2");
  if (!(h > 0.0) || !std::isfinite(h))
    throw DomainError("heat-kernel time h must be positive and finite");
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
    throw DomainError("quadrature tolerances must be positive");
  if (!(cfg.radius_scale > 0.0))
    throw DomainError("radius_scale must be positive");
  if (cfg.max_level < 4) throw DomainError("max_level must be at least 4");
  check_point(group, g);

  const Eigen::Index m = group.m();
  const Vec shift = resolve_shift(group, g, cfg);
  const TubeIntegrand tube(group, g, shift);
  const auto at_center = tube.eval(Vec::Zero(m));
  const double k_ref = at_center.first.real();
  const double v0 = std::abs(at_center.second);
  const double inv4h = 0.25 / h;

  auto f = [&](const Vec& lambda) -> Complex {
    const auto [phi, v] = tube.eval(lambda);
    const Complex expo = -(phi - k_ref) * inv4h;
    // The real part of phi_tilde on the shifted plane never drops below its
    // central value, so a large positive exponent means the shift is bad.
    if (expo.real() > 700.0)
      throw QuadratureFailure(
          "integrand violates its exponential bound; contour shift is not "
          "admissible for this point");
    return v * std::exp(expo);
  };

  const double R = pick_radius(f, m, v0, cfg);
  const double w0 = std::min(R, std::max(2.0 * std::sqrt(h), R / 4096.0));
  const Complex q = integrate_tube(f, m, R, w0, cfg);

  // Conjugate symmetry in lambda makes the exact integral real; whatever
  // imaginary part survives is quadrature error and must sit at noise level.
  const double residual_cap = 8.0 * (cfg.rel_tol * std::abs(q) + cfg.abs_tol);
  if (std::abs(q.imag()) > residual_cap)
    throw QuadratureFailure("imaginary residue " + std::to_string(q.imag()) +
                            " exceeds the tolerance budget " +
                            std::to_string(residual_cap));
  if (!(q.real() > 0.0))
    throw QuadratureFailure(
        "tube integral lost positivity; increase tolerances or adjust the "
        "contour shift");
  return {k_ref, q.real(), inv4h};
}

}  // namespace

double v_factor(const Group& group, const Vec& lambda) {
  if (lambda.size() != group.m())
    throw DimensionMismatch("lambda has size " + std::to_string(lambda.size()) +
                            ", expected " + std::to_string(group.m()));
  const Spectrum sp = spectrum(group, lambda);
  const double tol = 1e-12 * (1.0 + sp.eigenvalues.cwiseAbs().maxCoeff());
  double out = 1.0;
  for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) {
    const double rho = sp.eigenvalues[i];
    if (rho > tol) out *= rho / std::sinh(rho);
  }
  return out;
}

Complex v_factor_shifted(const Group& group, const Vec& shift, const Vec& lambda) {
  if (shift.size() != group.m() || lambda.size() != group.m())
    throw DimensionMismatch("shift/lambda size does not match the vertical dimension");
  if (!in_omega_star(group, shift))
    throw DomainError(
        "contour shift must keep the vertical operator norm below pi");
  CMat M = (-group.u_tilde(shift)).cast<Complex>();
  M += Complex(0.0, 1.0) * group.u_tilde(lambda).cast<Complex>();
  Eigen::ComplexEigenSolver<CMat> es(M, false);
  if (es.info() != Eigen::Success) throw NonConvergence(0, 0.0);
  return pair_product(es.eigenvalues(), group.q());
}

double heat_kernel(const Group& group, const Point& g, double h,
                   const QuadratureConfig& cfg) {
  const KernelParts parts = evaluate_kernel(group, g, h, cfg);
  return std::exp(-parts.k_ref * parts.inv4h) * parts.q_re;
}

double heat_kernel_log(const Group& group, const Point& g, double h,
                       const QuadratureConfig& cfg) {
  const KernelParts parts = evaluate_kernel(group, g, h, cfg);
  return -parts.k_ref * parts.inv4h + std::log(parts.q_re);
}

VaradhanResult varadhan_estimate(const Group& group, const Point& g,
                                 const std::vector<double>& h_list,
                                 const QuadratureConfig& cfg) {
  if (h_list.empty()) throw DomainError("h list must not be empty");
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (!(h_list[i] > 0.0) || !std::isfinite(h_list[i]))
      throw DomainError("h list entries must be positive and finite");
    if (i > 0 && !(h_list[i] < h_list[i - 1]))
      throw DomainError("h list must be strictly descending");
  }
  QuadratureConfig local = cfg;
  local.contour_shift = resolve_shift(group, g, cfg);

  VaradhanResult out;
  out.h = h_list;
  out.neg4h_log_p.reserve(h_list.size());
  for (const double h : h_list)
    out.neg4h_log_p.push_back(-4.0 * h * heat_kernel_log(group, g, h, local));

  const Eigen::Index n = static_cast<Eigen::Index>(h_list.size());
  if (n == 1) {
    out.extrapolated = out.neg4h_log_p[0];
    return out;
  }
  // Least-squares fit of the small-time correction family
  //   value(h) = d2 + a * h * log(1/h) + b * h.
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = h_list[static_cast<std::size_t>(i)];
    A(i, 0) = 1.0;
    A(i, 1) = h * std::log(1.0 / h);
    A(i, 2) = h;
    y[i] = out.neg4h_log_p[static_cast<std::size_t>(i)];
  }
  if (n == 2) {
    const Eigen::Vector2d c =
        A.leftCols(2).colPivHouseholderQr().solve(y);
    out.extrapolated = c[0];
  } else {
    const Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
    out.extrapolated = c[0];
  }
  return out;
}

}  // namespace ccdist
