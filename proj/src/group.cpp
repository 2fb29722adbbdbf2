#include "ccdist/group.hpp"

#include <cmath>

namespace ccdist {

Mat Group::u_tilde(const Vec& tau) const {
  check_vertical(tau);
  Mat acc = Mat::Zero(q(), q());
  for (Eigen::Index j = 0; j < m(); ++j) acc += tau[j] * generator(j);
  return acc;
}

CMat Group::u_hermitian(const Vec& tau) const {
  return Complex(0.0, 1.0) * u_tilde(tau).cast<Complex>();
}

Vec Group::pairing(const Vec& x, const Vec& y) const {
  check_horizontal(x);
  check_horizontal(y);
  Vec out(m());
  for (Eigen::Index j = 0; j < m(); ++j) out[j] = y.dot(generator(j) * x);
  return out;
}

Group validate_group(GroupSpec spec) {
  if (spec.q < 1 || spec.m < 1)
    throw DimensionMismatch("group needs q >= 1 and m >= 1");
  if (static_cast<Eigen::Index>(spec.generators.size()) != spec.m)
    throw DimensionMismatch("generator count does not match m");
  if (spec.m > spec.q * (spec.q - 1) / 2)
    throw LinearlyDependentFamily("m exceeds the dimension of skew matrices");

  double scale = 0.0;
  for (Eigen::Index j = 0; j < spec.m; ++j) {
    const Mat& U = spec.generators[static_cast<std::size_t>(j)];
    if (U.rows() != spec.q || U.cols() != spec.q)
      throw DimensionMismatch("generator " + std::to_string(j) + " is not q x q");
    const double mag = U.cwiseAbs().maxCoeff();
    if ((U + U.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::fmax(1.0, mag))
      throw NotSkewSymmetric(static_cast<int>(j));
    scale = std::fmax(scale, U.operatorNorm());
  }

  // Linear independence of the vectorized generators.
  Mat stacked(spec.m, spec.q * spec.q);
  for (Eigen::Index j = 0; j < spec.m; ++j) {
    const Mat& U = spec.generators[static_cast<std::size_t>(j)];
    stacked.row(j) = Eigen::Map<const Vec>(U.data(), U.size()).transpose();
  }
  Eigen::ColPivHouseholderQR<Mat> qr(stacked.transpose());
  qr.setThreshold(1e-10);
  if (qr.rank() < spec.m) throw LinearlyDependentFamily("generators are linearly dependent");

  return Group(std::move(spec), scale);
}

Spectrum spectrum(const Group& g, const Vec& tau) {
  g.check_vertical(tau);
  Eigen::SelfAdjointEigenSolver<CMat> es(g.u_hermitian(tau));
  if (es.info() != Eigen::Success)
    throw NumericalError("Hermitian eigendecomposition failed");
  Spectrum s;
  s.tau = tau;
  s.eigenvalues = es.eigenvalues();
  s.basis = es.eigenvectors();
  // Deterministic phase: first component above threshold becomes real positive.
  for (Eigen::Index c = 0; c < s.basis.cols(); ++c) {
    const double colmax = s.basis.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < s.basis.rows(); ++r) {
      const Complex v = s.basis(r, c);
      if (std::abs(v) > 1e-8 * colmax) {
        s.basis.col(c) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }
  return s;
}

Vec apply_fn(const Spectrum& spec, const std::function<Complex(double)>& fn, const Vec& x) {
  if (x.size() != spec.basis.rows())
    throw DimensionMismatch("apply_fn: vector does not match spectrum dimension");
  CVec y = spec.basis.adjoint() * x.cast<Complex>();
  double fmax = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const Complex fi = fn(spec.eigenvalues[i]);
    fmax = std::fmax(fmax, std::abs(fi));
    y[i] *= fi;
  }
  const CVec out = spec.basis * y;
  const double imag_norm = out.imag().norm();
  if (imag_norm > 1e-10 * x.norm() * std::fmax(fmax, 1.0))
    throw NumericalError("apply_fn: imaginary residue exceeds tolerance; fn(-s) != conj(fn(s))?");
  return out.real();
}

Vec apply_fn(const Spectrum& spec, KernelName fn, const Vec& x) {
  auto wrapped = [fn](double s) -> Complex {
    try {
      return Complex(kernel_eval(fn, s), 0.0);
    } catch (const PoleError& e) {
      throw PoleAtEigenvalue(e.s);
    }
  };
  return apply_fn(spec, wrapped, x);
}

double operator_norm(const Group& g, const Vec& tau) {
  const Spectrum s = spectrum(g, tau);
  return s.eigenvalues.cwiseAbs().maxCoeff();
}

bool in_omega_star(const Group& g, const Vec& tau, double tol_boundary) {
  return operator_norm(g, tau) < M_PI - tol_boundary;
}

bool in_good_set(const Group& g, const Spectrum& spec) {
  const double tol = 1e-8 * (1.0 + spec.tau.norm());
  for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) {
    const double a = std::fabs(spec.eigenvalues[i]);
    const double k = std::nearbyint(a / M_PI);
    if (k >= 1.0 && std::fabs(a - k * M_PI) < tol) return false;
  }
  return true;
}

bool in_good_set(const Group& g, const Vec& theta) {
  return in_good_set(g, spectrum(g, theta));
}

}  // namespace ccdist
