#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "ccdist/errors.hpp"
#include "ccdist/scalar_kernels.hpp"

namespace ccdist {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

// A step-two Carnot group G(q, m, U): horizontal layer R^q, vertical layer
// R^m, group law
//   (x, t) . (x', t') = (x + x', t + t' + <U x, x'> / 2)
// determined by m linearly independent skew-symmetric q x q generators.
struct GroupSpec {
  Eigen::Index q = 0;
  Eigen::Index m = 0;
  std::vector<Mat> generators;
};

class Group {
 public:
  Eigen::Index q() const { return spec_.q; }
  Eigen::Index m() const { return spec_.m; }
  const Mat& generator(Eigen::Index j) const { return spec_.generators[static_cast<std::size_t>(j)]; }

  // u_tilde(tau) = sum_j tau_j U^(j), real skew-symmetric.
  Mat u_tilde(const Vec& tau) const;

  // U(tau) = i * u_tilde(tau), Hermitian for real tau.
  CMat u_hermitian(const Vec& tau) const;

  // Component j of the result is <U^(j) x, y>.
  Vec pairing(const Vec& x, const Vec& y) const;

  // max_j spectral norm of U^(j); used for validation-scaled tolerances.
  double generator_scale() const { return generator_scale_; }

  void check_vertical(const Vec& tau) const {
    if (tau.size() != m()) throw DimensionMismatch("vertical vector has wrong dimension");
  }
  void check_horizontal(const Vec& x) const {
    if (x.size() != q()) throw DimensionMismatch("horizontal vector has wrong dimension");
  }

 private:
  friend Group validate_group(GroupSpec spec);
  Group(GroupSpec spec, double scale) : spec_(std::move(spec)), generator_scale_(scale) {}
  GroupSpec spec_;
  double generator_scale_;
};

// Checks dimensions, skew-symmetry of every generator and linear independence
// of the family.  Throws DimensionMismatch / NotSkewSymmetric(j) /
// LinearlyDependentFamily.
Group validate_group(GroupSpec spec);

struct Point {
  Vec x;
  Vec t;
};

inline void check_point(const Group& g, const Point& p) {
  g.check_horizontal(p.x);
  g.check_vertical(p.t);
}

// Anisotropic dilation delta_r(x, t) = (r x, r^2 t).
inline Point dilate(const Point& p, double r) { return {r * p.x, r * r * p.t}; }

// Eigendecomposition of the Hermitian matrix U(tau).  Eigenvalues ascending
// (they come in +/- pairs); basis columns are orthonormal with a deterministic
// phase: the first component of each eigenvector exceeding a small threshold
// is made real positive.
struct Spectrum {
  Vec tau;
  Vec eigenvalues;
  CMat basis;
};

Spectrum spectrum(const Group& g, const Vec& tau);

// B f(Lambda) B^* x for the scalar function fn evaluated on the eigenvalues.
// fn must satisfy fn(-s) = conj(fn(s)) so the result is real; the imaginary
// residue is checked against 1e-10 * |x| * max|fn| and discarded.
Vec apply_fn(const Spectrum& spec, const std::function<Complex(double)>& fn, const Vec& x);

// Named-kernel overload; refuses evaluation at a pole with PoleAtEigenvalue.
Vec apply_fn(const Spectrum& spec, KernelName fn, const Vec& x);

double operator_norm(const Group& g, const Vec& tau);

// tau lies in the open set Omega* = { ||U(tau)|| < pi }, with a safety margin.
bool in_omega_star(const Group& g, const Vec& tau, double tol_boundary = 1e-9);

// theta lies in the good set: no eigenvalue of U(theta) within
// 1e-8 * (1 + |theta|) of {k*pi : k >= 1}.
bool in_good_set(const Group& g, const Vec& theta);
bool in_good_set(const Group& g, const Spectrum& spec);

}  // namespace ccdist
