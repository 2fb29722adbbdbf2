#include "ccdist/scalar_kernels.hpp"

#include <array>
#include <cmath>
#include <cstdlib>

#include "ccdist/errors.hpp"

namespace ccdist {
namespace {

// Split representation of pi so that s - k*pi keeps full relative accuracy
// near the poles.
constexpr double kPiHi = 3.14159265358979311599796346854418516159057617187500;
constexpr double kPiLo = 1.2246467991473531772e-16;
constexpr double kPi = kPiHi;

constexpr double kTaylorRadius = 0.1;
constexpr double kSeriesRadius = 5.9;  // partial fractions used below this |s|

// Taylor coefficients of f(s) = 1 - s cot s = sum b_k s^(2k).
constexpr std::array<double, 8> kB = {
    1.0 / 3.0,
    1.0 / 45.0,
    2.0 / 945.0,
    1.0 / 4725.0,
    2.0 / 93555.0,
    1382.0 / 638512875.0,
    4.0 / 18243225.0,
    3617.0 / 162820783125.0,
};

struct Reduced {
  long k;      // nearest multiple of pi
  double eps;  // s - k*pi, |eps| <= pi/2 + ulp
};

Reduced reduce(double s) {
  const long k = static_cast<long>(std::nearbyint(s / kPi));
  const double kd = static_cast<double>(k);
  const double eps = (s - kd * kPiHi) - kd * kPiLo;
  return {k, eps};
}

double pole_tol(double s) { return 1e-12 * std::fmax(1.0, std::fabs(s)); }

void check_pole(double s, const Reduced& r) {
  if (r.k != 0 && std::fabs(r.eps) < pole_tol(s)) throw PoleError(s);
}

double poly_even(const double* c, int n, double s2) {
  double acc = 0.0;
  for (int i = n - 1; i >= 0; --i) acc = acc * s2 + c[i];
  return acc;
}

// sum_{j > J} j^(-n), Euler-Maclaurin at a = J+1.  Accurate to ~1e-19 relative
// for J >= 64, n >= 2.
double zeta_tail(int n, int J) {
  const double a = J + 1.0;
  const double x = 1.0 / a;
  const double xn = std::pow(x, n);
  double acc = xn * a / (n - 1.0);  // a^(1-n)/(n-1)
  acc += 0.5 * xn;
  const double nn = n;
  acc += (nn / 12.0) * xn * x;
  acc -= (nn * (nn + 1) * (nn + 2) / 720.0) * xn * x * x * x;
  acc += (nn * (nn + 1) * (nn + 2) * (nn + 3) * (nn + 4) / 30240.0) * xn * x * x * x * x * x;
  return acc;
}

// sum_{j >= 1} ((j*pi)^2 - s^2)^(-pw) for pw in {1,2,3}, valid for |s| < (J+1)*pi
// away from the poles.  Explicit terms to J, analytic tail beyond.
template <int PW>
double sigma(double s) {
  constexpr int J = 128;
  const double s2 = s * s;
  double acc = 0.0;
  for (int j = J; j >= 1; --j) {
    // (j pi)^2 - s^2 with the difference formed against split pi, so the
    // nearest term keeps full relative accuracy when s approaches a pole.
    const double diff = (j * kPiHi - s) + j * kPiLo;
    const double d = diff * (j * kPi + s);
    double term = 1.0 / d;
    if constexpr (PW >= 2) term /= d;
    if constexpr (PW >= 3) term /= d;
    acc += term;
  }
  // tail: sum_t binom(PW-1+t, t) s^(2t) pi^(-2PW-2t) zeta_tail(2PW+2t, J)
  const double pi2 = kPi * kPi;
  double coeff = 1.0;  // binom(PW-1, 0)
  double spow = 1.0;
  double pipow = std::pow(pi2, -PW);
  for (int t = 0; t <= 6; ++t) {
    acc += coeff * spow * pipow * zeta_tail(2 * PW + 2 * t, J);
    coeff *= static_cast<double>(PW + t) / (t + 1);
    spow *= s2;
    pipow /= pi2;
  }
  return acc;
}

double f_pos(double s);

double s_cot_s_pos(double s) {
  if (s < kTaylorRadius) return 1.0 - f_pos(s);
  const Reduced r = reduce(s);
  check_pole(s, r);
  return s * (std::cos(r.eps) / std::sin(r.eps));
}

double f_pos(double s) {
  if (s < kTaylorRadius) {
    const double s2 = s * s;
    return s2 * poly_even(kB.data(), static_cast<int>(kB.size()), s2);
  }
  return 1.0 - s_cot_s_pos(s);
}

double mu_pos(double s) {
  if (s < kTaylorRadius) {
    std::array<double, 8> c{};
    for (std::size_t k = 0; k < kB.size(); ++k) c[k] = 2.0 * (k + 1) * kB[k];
    const double s2 = s * s;
    return s * poly_even(c.data(), static_cast<int>(c.size()), s2);
  }
  const Reduced r = reduce(s);
  check_pole(s, r);
  const double sn = std::sin(r.eps);
  return (2.0 * s - std::sin(2.0 * r.eps)) / (2.0 * sn * sn);
}

double mu_prime_pos(double s) {
  if (s < kTaylorRadius) {
    std::array<double, 8> c{};
    for (std::size_t k = 0; k < kB.size(); ++k) {
      const double tk = 2.0 * (k + 1);
      c[k] = tk * (tk - 1.0) * kB[k];
    }
    const double s2 = s * s;
    return poly_even(c.data(), static_cast<int>(c.size()), s2);
  }
  const Reduced r = reduce(s);
  check_pole(s, r);
  const double sn = std::sin(r.eps);
  return 2.0 * f_pos(s) / (sn * sn);
}

double psi_pos(double s) {
  if (s < kTaylorRadius) {
    const double s2 = s * s;
    return poly_even(kB.data(), static_cast<int>(kB.size()), s2);
  }
  if (s < kSeriesRadius) {
    check_pole(s, reduce(s));
    return 2.0 * sigma<1>(s);
  }
  return f_pos(s) / (s * s);
}

double psi_d1_pos(double s) {
  if (s < kTaylorRadius) {
    std::array<double, 7> c{};
    for (std::size_t k = 1; k < kB.size(); ++k) c[k - 1] = (2.0 * (k + 1) - 2.0) * kB[k];
    const double s2 = s * s;
    return s * poly_even(c.data(), static_cast<int>(c.size()), s2);
  }
  if (s < kSeriesRadius) {
    check_pole(s, reduce(s));
    return 4.0 * s * sigma<2>(s);
  }
  return (mu_pos(s) - 2.0 * f_pos(s) / s) / (s * s);
}

double psi_d2_pos(double s) {
  if (s < kTaylorRadius) {
    std::array<double, 7> c{};
    for (std::size_t k = 1; k < kB.size(); ++k) {
      const double e = 2.0 * (k + 1) - 2.0;
      c[k - 1] = e * (e - 1.0) * kB[k];
    }
    const double s2 = s * s;
    return poly_even(c.data(), static_cast<int>(c.size()), s2);
  }
  if (s < kSeriesRadius) {
    check_pole(s, reduce(s));
    return 4.0 * sigma<2>(s) + 16.0 * s * s * sigma<3>(s);
  }
  const double psi = psi_pos(s);
  const double psi1 = psi_d1_pos(s);
  return (mu_prime_pos(s) - 2.0 * psi - 4.0 * s * psi1) / (s * s);
}

double s_over_sin_pos(double s) {
  if (s == 0.0) return 1.0;
  const Reduced r = reduce(s);
  check_pole(s, r);
  const double sn = std::sin(r.eps);
  const double sign = (r.k % 2 == 0) ? 1.0 : -1.0;
  return s * sign / sn;
}

}  // namespace

double s_cot_s(double s) { return s_cot_s_pos(std::fabs(s)); }
double f_kernel(double s) { return f_pos(std::fabs(s)); }
double mu_kernel(double s) { return std::copysign(mu_pos(std::fabs(s)), s); }
double mu_prime(double s) { return mu_prime_pos(std::fabs(s)); }
double psi_kernel(double s) { return psi_pos(std::fabs(s)); }
double psi_d1(double s) { return std::copysign(psi_d1_pos(std::fabs(s)), s); }
double psi_d2(double s) { return psi_d2_pos(std::fabs(s)); }
double s_over_sin(double s) { return s_over_sin_pos(std::fabs(s)); }

double s_over_sin_sq(double s) {
  const double v = s_over_sin_pos(std::fabs(s));
  return v * v;
}

double kernel_eval(KernelName name, double s) {
  switch (name) {
    case KernelName::F: return f_kernel(s);
    case KernelName::MU: return mu_kernel(s);
    case KernelName::PSI: return psi_kernel(s);
    case KernelName::PSI1: return psi_d1(s);
    case KernelName::PSI2: return psi_d2(s);
    case KernelName::S_OVER_SIN: return s_over_sin(s);
    case KernelName::S_OVER_SIN_SQ: return s_over_sin_sq(s);
    case KernelName::S_COT_S: return s_cot_s(s);
  }
  throw ValidationError("unknown kernel name");
}

double mu_inverse(double y) {
  if (y == 0.0) return 0.0;
  const double ay = std::fabs(y);
  const double tol = 1e-12 * (1.0 + ay);

  // Bracket [lo, hi] with mu(lo) <= ay <= mu(hi).
  double lo = 0.0;
  double hi;
  if (ay < mu_pos(kPi / 2)) {
    hi = kPi / 2;
  } else {
    // mu(s) ~ pi/(pi - s)^2 near pi, so pi - s ~ sqrt(pi/y).
    const double gap = std::sqrt(kPi / ay);
    hi = kPi - 0.25 * gap;
    while (mu_pos(hi) < ay) hi = kPi - 0.25 * (kPi - hi);
  }
  double s = std::fmin(hi, std::fmax(lo, 1.5 * ay));  // mu(s) ~ 2s/3 near 0

  for (int it = 0; it < 200; ++it) {
    const double ms = mu_pos(s);
    const double res = ms - ay;
    if (std::fabs(res) <= tol) return std::copysign(s, y);
    if (res > 0)
      hi = s;
    else
      lo = s;
    // Once the bracket collapses to adjacent doubles no representable s can
    // do better; near the pole mu jumps by ~mu'(s) ulp(pi) between
    // neighbouring doubles, which overtakes tol around |y| ~ 1e12.  Return
    // the endpoint whose value is closer.
    if (std::nextafter(lo, kPi) >= hi) {
      const double s_best =
          std::fabs(mu_pos(hi) - ay) < std::fabs(lo > 0.0 ? mu_pos(lo) - ay : -ay)
              ? hi
              : lo;
      return std::copysign(s_best, y);
    }
    const double d = mu_prime_pos(s);
    double next = s - res / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
  }
  throw NonConvergence(200, std::fabs(mu_pos(s) - ay));
}

double theta1() {
  static const double root = [] {
    double lo = kPi + 0.5;
    double hi = 1.5 * kPi - 0.01;
    // h(s) = sin s - s cos s changes sign exactly where tan s = s here.
    auto h = [](double s) { return std::sin(s) - s * std::cos(s); };
    const double hlo = h(lo);
    for (int i = 0; i < 90; ++i) {
      const double mid = 0.5 * (lo + hi);
      if ((h(mid) > 0) == (hlo > 0))
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return root;
}

KConstants k_constants(double r, double v2) {
  if (!(r > kPi && r < theta1()))
    throw DomainError("k_constants requires pi < r < theta1");
  KConstants k;
  k.k1 = 4.0 * sigma<2>(r);
  k.k2 = 16.0 * sigma<3>(r);
  k.k3 = 2.0 * psi_kernel(r) + k.k1 * v2 * v2;
  return k;
}

}  // namespace ccdist
