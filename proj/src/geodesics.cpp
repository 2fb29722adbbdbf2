#include "ccdist/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ccdist/parallel.hpp"
#include "ccdist/quadrature.hpp"
#include "ccdist/reference.hpp"

namespace ccdist {
namespace {

// e^{-i s lambda} * sin(s lambda) / lambda, the entire kernel mapping zeta0 to x(s).
Complex position_kernel(double s, double lambda) {
  const double a = s * lambda;
  const double ratio = (lambda == 0.0) ? s : std::sin(a) / lambda;
  return std::polar(ratio, -a);
}

struct Flow {
  const Group* g;
  Spectrum sp;
  CVec y0;  // basis^* zeta0

  Vec zeta(double s) const {
    CVec w(y0.size());
    for (Eigen::Index i = 0; i < y0.size(); ++i)
      w[i] = std::polar(1.0, -2.0 * s * sp.eigenvalues[i]) * y0[i];
    return (sp.basis * w).real();
  }
  Vec position(double s) const {
    CVec w(y0.size());
    for (Eigen::Index i = 0; i < y0.size(); ++i)
      w[i] = position_kernel(s, sp.eigenvalues[i]) * y0[i];
    return (sp.basis * w).real();
  }
  Vec vertical_rate(double s) const {
    return 0.5 * g->pairing(position(s), zeta(s));
  }
};

// Sorted band indices floor(|lambda_i| / pi); a Newton step that changes this
// signature has crossed a pole sheet of the reference function and is rejected.
std::vector<int> band_signature(const Vec& eigenvalues) {
  std::vector<int> bands(static_cast<std::size_t>(eigenvalues.size()));
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    bands[static_cast<std::size_t>(i)] =
        static_cast<int>(std::floor(std::fabs(eigenvalues[i]) / M_PI));
  std::sort(bands.begin(), bands.end());
  return bands;
}

struct NewtonHit {
  Vec theta;
  bool ok = false;
};

NewtonHit newton_to_critical(const Group& g, const Point& p, Vec theta) {
  const double scale = critical_scale(p);
  Spectrum sp = spectrum(g, theta);
  if (!in_good_set(g, sp)) return {};
  std::vector<int> bands = band_signature(sp.eigenvalues);
  Vec grad = grad_phi(g, p, theta);

  for (int iter = 0; iter < 200; ++iter) {
    if (grad.norm() <= 1e-10 * scale) {
      // Undamped polish; stops on its own once rounding dominates.
      for (int k = 0; k < 8 && grad.norm() > 1e-13 * scale; ++k) {
        const Vec step = hess_phi(g, p, theta).fullPivLu().solve(-grad);
        const Vec cand = theta + step;
        if (!in_good_set(g, cand)) break;
        const Vec cand_grad = grad_phi(g, p, cand);
        if (cand_grad.norm() >= grad.norm()) break;
        theta = cand;
        grad = cand_grad;
      }
      return {theta, true};
    }
    const Vec dir = hess_phi(g, p, theta).fullPivLu().solve(-grad);
    if (!dir.allFinite()) return {};
    double alpha = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 30; ++bt, alpha *= 0.5) {
      const Vec cand = theta + alpha * dir;
      Spectrum cand_sp = spectrum(g, cand);
      if (!in_good_set(g, cand_sp)) continue;
      if (band_signature(cand_sp.eigenvalues) != bands) continue;
      const Vec cand_grad = grad_phi(g, p, cand);
      if (cand_grad.norm() < (1.0 - 0.25 * alpha) * grad.norm()) {
        theta = cand;
        sp = std::move(cand_sp);
        grad = cand_grad;
        moved = true;
        break;
      }
    }
    if (!moved) return {};
  }
  return {};
}

}  // namespace

Geodesic exp_map(const Group& g, const Covector& cv, int samples) {
  g.check_horizontal(cv.zeta0);
  g.check_vertical(cv.theta0);
  const int n = std::max(samples, 1);

  Flow flow{&g, spectrum(g, cv.theta0), {}};
  flow.y0 = flow.sp.basis.adjoint() * cv.zeta0.cast<Complex>();

  Geodesic geo;
  geo.length = cv.zeta0.norm();
  geo.good = in_good_set(g, flow.sp);
  geo.times.reserve(static_cast<std::size_t>(n) + 1);
  geo.samples.reserve(static_cast<std::size_t>(n) + 1);

  const double t_scale = 1.0 + cv.zeta0.squaredNorm() * g.generator_scale();
  const double seg_tol = 1e-11 * t_scale / n;
  Vec t_acc = Vec::Zero(g.m());
  geo.times.push_back(0.0);
  geo.samples.push_back({Vec::Zero(g.q()), t_acc});
  for (int i = 1; i <= n; ++i) {
    const double s0 = static_cast<double>(i - 1) / n;
    const double s1 = static_cast<double>(i) / n;
    t_acc += gk_adaptive<Vec>([&flow](double u) { return flow.vertical_rate(u); },
                              s0, s1, seg_tol);
    geo.times.push_back(s1);
    geo.samples.push_back({flow.position(s1), t_acc});
  }
  geo.endpoint = geo.samples.back();
  return geo;
}

Covector initial_velocity(const Group& g, const Vec& x, const Vec& theta) {
  g.check_horizontal(x);
  const Spectrum sp = spectrum(g, theta);
  if (!in_good_set(g, sp))
    throw BadTheta("theta has an eigenvalue at a nonzero multiple of pi; "
                   "the endpoint map is not invertible there");
  const Vec zeta0 = apply_fn(
      sp, [](double s) { return Complex(s_cot_s(s), s); }, x);
  return {zeta0, theta};
}

std::vector<GeodesicCandidate> normal_geodesics_through(const Group& g, const Point& p,
                                                        int seeds) {
  check_point(g, p);
  const Eigen::Index m = g.m();

  std::vector<Vec> starts;
  starts.push_back(Vec::Zero(m));
  for (Eigen::Index j = 0; j < m; ++j) {
    Vec axis = Vec::Zero(m);
    axis[j] = 1.0;
    const double s = operator_norm(g, axis);
    if (s <= 0.0) continue;
    for (const double band : {0.5, 1.5, 2.5})
      for (const double sgn : {1.0, -1.0}) starts.push_back(sgn * band * M_PI / s * axis);
  }
  std::mt19937 rng(0x5eed5u);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.1, 3.4);
  while (static_cast<int>(starts.size()) < seeds) {
    Vec dir(m);
    for (Eigen::Index j = 0; j < m; ++j) dir[j] = gauss(rng);
    const double dn = dir.norm();
    if (dn < 1e-12) continue;
    dir /= dn;
    const double s = operator_norm(g, dir);
    const double c = unif(rng);
    if (s <= 0.0) continue;
    starts.push_back(c * M_PI / s * dir);
  }

  struct SeedResult {
    Vec theta;
    bool ok = false;
  };
  const std::vector<SeedResult> hits = parallel_map<SeedResult>(
      starts.size(), [&](std::size_t i) -> SeedResult {
        try {
          NewtonHit hit = newton_to_critical(g, p, starts[i]);
          if (!hit.ok) return {};
          return {hit.theta, true};
        } catch (const NumericalError&) {
          return {};
        }
      });

  std::vector<Vec> thetas;
  for (const SeedResult& h : hits)
    if (h.ok) thetas.push_back(h.theta);

  std::vector<GeodesicCandidate> out;
  for (const Vec& theta : thetas) {
    bool dup = false;
    for (const GeodesicCandidate& c : out)
      if ((c.covector.theta0 - theta).norm() <= 1e-6 * (1.0 + theta.norm())) {
        dup = true;
        break;
      }
    if (dup) continue;
    try {
      GeodesicCandidate cand;
      cand.covector = initial_velocity(g, p.x, theta);
      cand.length_sq = cand.covector.zeta0.squaredNorm();
      const Geodesic geo = exp_map(g, cand.covector, 1);
      cand.endpoint_error =
          std::max((geo.endpoint.x - p.x).norm() / (1.0 + p.x.norm()),
                   (geo.endpoint.t - p.t).norm() / (1.0 + p.t.norm()));
      out.push_back(std::move(cand));
    } catch (const Error&) {
      continue;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const GeodesicCandidate& a, const GeodesicCandidate& b) {
              if (a.length_sq != b.length_sq) return a.length_sq < b.length_sq;
              return std::lexicographical_compare(
                  a.covector.theta0.data(), a.covector.theta0.data() + a.covector.theta0.size(),
                  b.covector.theta0.data(), b.covector.theta0.data() + b.covector.theta0.size());
            });
  return out;
}

LengthIdentity critical_length_identity(const Group& g, const Vec& x, const Vec& theta) {
  g.check_horizontal(x);
  const Covector cv = initial_velocity(g, x, theta);  // validates the good set
  LengthIdentity id;
  const Vec zero_t = Vec::Zero(g.m());
  id.endpoint = {x, -0.25 * grad_phi(g, {x, zero_t}, theta)};
  id.phi_value = phi(g, id.endpoint, theta);
  id.length_sq = cv.zeta0.squaredNorm();
  id.gap = std::fabs(id.phi_value - id.length_sq) / std::max(1.0, id.length_sq);
  return id;
}

}  // namespace ccdist
