#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ccdist/geodesics.hpp"
#include "ccdist/group.hpp"
#include "ccdist/group_io.hpp"
#include "ccdist/reference.hpp"
#include "ccdist/scalar_kernels.hpp"
#include "ccdist/solver.hpp"

using namespace ccdist;

namespace {

Vec vec1(double a) {
  Vec v(1);
  v << a;
  return v;
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

Vec random_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v.normalized();
}

}  // namespace

TEST_CASE("model point with a stationary interior maximizer") {
  const Group g = make_heisenberg(2);
  const Point p{vec2(1.0, 0.0), vec1(M_PI / 8)};
  const MaxResult mr = maximize_phi(g, p);
  CHECK(mr.location == MaxLocation::INTERIOR);
  CHECK(mr.nondegenerate);
  CHECK(mr.value == doctest::Approx(M_PI * M_PI / 4).epsilon(1e-10));
  CHECK(mr.theta[0] == doctest::Approx(M_PI / 2).epsilon(1e-9));
  CHECK(mr.min_negative_curvature > 0.0);

  const DistanceResult dr = distance_squared(g, p);
  CHECK(dr.certificate == Certificate::EXACT_STATIONARY);
  CHECK(dr.d_squared == doctest::Approx(M_PI * M_PI / 4).epsilon(1e-10));
  CHECK(dr.geodesic_available);
  CHECK_FALSE(dr.on_cut_locus.has_value());

  // The reported covector reproduces the point through the exponential map.
  const Covector cv = initial_velocity(g, p.x, dr.theta);
  const Geodesic geo = exp_map(g, cv);
  CHECK((geo.endpoint.x - p.x).norm() < 1e-8);
  CHECK(std::fabs(geo.endpoint.t[0] - p.t[0]) < 1e-8);
  CHECK(geo.length * geo.length == doctest::Approx(dr.d_squared).epsilon(1e-9));
}

TEST_CASE("purely vertical point pushes the supremum to the boundary") {
  const Group g = make_heisenberg(2);
  const Point p{vec2(0.0, 0.0), vec1(1.0)};
  const MaxResult mr = maximize_phi(g, p);
  CHECK(mr.location == MaxLocation::BOUNDARY);
  CHECK(mr.value == doctest::Approx(4 * M_PI).epsilon(1e-8));

  const DistanceResult dr = distance_squared(g, p);
  CHECK(dr.certificate == Certificate::LOWER_BOUND);
  CHECK_FALSE(dr.geodesic_available);
  CHECK(dr.d_squared <= 4 * M_PI * (1 + 1e-8));
}

TEST_CASE("horizontal points maximize at the origin of the vertical space") {
  std::mt19937_64 rng(301);
  for (const Group& g : {make_heisenberg(4), make_star(2), make_n32()}) {
    const Point p{2.0 * random_unit(g.q(), rng), Vec(Vec::Zero(g.m()))};
    const MaxResult mr = maximize_phi(g, p);
    CHECK(mr.location == MaxLocation::INTERIOR);
    CHECK(mr.value == doctest::Approx(p.x.squaredNorm()).epsilon(1e-9));
    CHECK(mr.theta.norm() < 1e-6);
  }
}

TEST_CASE("maximizer value dominates phi on a sample of Omega*") {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> ud(0.05, 0.95);
  const Group g = make_n32();
  const Point p{vec3(0.9, -0.4, 0.2), vec3(0.2, 0.05, -0.3)};
  const MaxResult mr = maximize_phi(g, p);
  for (int it = 0; it < 200; ++it) {
    Vec tau = random_unit(3, rng) * ud(rng) * M_PI;
    CHECK(phi(g, p, tau) <= mr.value + 1e-8 * (1 + std::fabs(mr.value)));
  }
}

TEST_CASE("dilation equivariance of the maximizer") {
  const Group g = make_star(3);
  std::mt19937_64 rng(307);
  Point p{random_unit(4, rng), 0.3 * random_unit(3, rng)};
  const DistanceResult base = distance_squared(g, p);
  for (double r : {0.5, 2.0, 3.5}) {
    const DistanceResult scaled = distance_squared(g, dilate(p, r));
    CHECK(scaled.d_squared ==
          doctest::Approx(r * r * base.d_squared).epsilon(1e-9));
    CHECK(scaled.certificate == base.certificate);
    // theta transforms inversely to the squared dilation.
    if (base.location == MaxLocation::INTERIOR)
      CHECK((scaled.theta - base.theta).norm() < 1e-6 * (1 + base.theta.norm()));
  }
}

TEST_CASE("inversion symmetry: g and g^{-1} are equidistant from the origin") {
  std::mt19937_64 rng(311);
  for (const Group& g : {make_heisenberg(2), make_n32()}) {
    for (int it = 0; it < 5; ++it) {
      Point p{1.5 * random_unit(g.q(), rng), 0.4 * random_unit(g.m(), rng)};
      Point inv{-p.x, -p.t};  // (x,t)^{-1} = (-x,-t) in a step-two group
      const double a = distance_squared(g, p).d_squared;
      const double b = distance_squared(g, inv).d_squared;
      CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
  }
}

TEST_CASE("recovers constructed critical points") {
  // Build points g = (x, t(theta)) whose maximizer is known by construction,
  // then ask the solver to find it.
  std::mt19937_64 rng(313);
  std::uniform_real_distribution<double> ud(0.1, 0.9);
  for (const Group& g : {make_heisenberg(2), make_star(2), make_n32()}) {
    for (int it = 0; it < 6; ++it) {
      Vec x = 1.3 * random_unit(g.q(), rng);
      Vec theta = random_unit(g.m(), rng);
      theta *= ud(rng) * M_PI / operator_norm(g, theta);
      const LengthIdentity id = critical_length_identity(g, x, theta);
      REQUIRE(id.gap < 1e-9);

      const MaxResult mr = maximize_phi(g, id.endpoint);
      if (mr.location != MaxLocation::INTERIOR) continue;  // cut-side samples
      CHECK(mr.value == doctest::Approx(id.phi_value).epsilon(1e-9));
      CHECK((mr.theta - theta).norm() < 1e-7 * (1 + theta.norm()));
    }
  }
}

TEST_CASE("classify_point") {
  const Group g = make_heisenberg(2);
  CHECK(classify_point(g, {vec2(1.0, 0.0), vec1(M_PI / 8)}) ==
        PointClass::INTERIOR_UNIQUE);
  CHECK(classify_point(g, {vec2(0.0, 0.0), vec1(0.7)}) ==
        PointClass::BOUNDARY_SUP);

  // Star group, hub coordinate zero: an interior degenerate maximizer, i.e.
  // several distinct shortest geodesics.
  const Group s = make_star(2);
  CHECK(classify_point(s, {vec3(0.0, 1.0, 0.0), Vec(Vec::Zero(2))}) ==
        PointClass::INTERIOR_MULTIPLE);
}

TEST_CASE("to_string coverage") {
  CHECK(std::string(to_string(MaxLocation::INTERIOR)) == "INTERIOR");
  CHECK(std::string(to_string(MaxLocation::BOUNDARY)) == "BOUNDARY");
  CHECK(std::string(to_string(Certificate::EXACT_STATIONARY)) ==
        "EXACT_STATIONARY");
  CHECK(std::string(to_string(Certificate::EXACT_LIMIT)) == "EXACT_LIMIT");
  CHECK(std::string(to_string(Certificate::LOWER_BOUND)) == "LOWER_BOUND");
  CHECK(std::string(to_string(PointClass::INTERIOR_UNIQUE)) ==
        "INTERIOR_UNIQUE");
  CHECK(std::string(to_string(PointClass::INTERIOR_MULTIPLE)) ==
        "INTERIOR_MULTIPLE");
  CHECK(std::string(to_string(PointClass::BOUNDARY_SUP)) == "BOUNDARY_SUP");
}

TEST_CASE("validation errors propagate") {
  const Group g = make_heisenberg(2);
  Point bad{vec3(1.0, 0.0, 0.0), vec1(0.1)};  // x has dimension 3, q = 2
  CHECK_THROWS_AS(distance_squared(g, bad), DimensionMismatch);
  Point bad_t{vec2(1.0, 0.0), vec2(0.1, 0.2)};
  CHECK_THROWS_AS(maximize_phi(g, bad_t), DimensionMismatch);
}
