#include <doctest.h>

#include <random>

#include "holomet/errors.hpp"
#include "holomet/metric_lab.hpp"
#include "holomet/solver.hpp"
#include "support.hpp"

using namespace holomet;
using doctest::Approx;

namespace {
ComplexVector vec(double p, std::vector<cplx> e) {
  const std::size_t n = e.size();
  return ComplexVector(SpaceSignature::lp(n, p), std::move(e));
}
}  // namespace

TEST_CASE("bracket edge cases") {
  const ComplexVector x = vec(2.0, {0.2, 0.1});
  const MetricEstimate same = metric_bracket(x, x);
  CHECK(same.lower == 0.0);
  CHECK(same.upper == 0.0);
  const auto inf = SpaceSignature::lp(2, Exponent::infinity());
  const ComplexVector a(inf, {0.3, cplx(0, 0.2)}), b(inf, {-0.4, 0.5});
  const MetricEstimate poly = metric_bracket(a, b);
  CHECK(poly.lower == Approx(polydisc_distance(a, b)).epsilon(1e-12));
  CHECK(poly.lower <= poly.upper + 1e-9);
  CHECK_THROWS_AS(metric_bracket(x, vec(2.0, {1.0, 0.5})), DomainError);
}

TEST_CASE("upper bound from the origin is exact with the linear disc") {
  const ComplexVector y = vec(1.5, {0.3, cplx(0.1, 0.2)});
  const UpperBound u = kobayashi_upper(vec(1.5, {0.0, 0.0}), y, 1, 4);
  CHECK(u.value == Approx(testsupport::plain_atanh(norm(y))).epsilon(1e-9));
}

TEST_CASE("affine discs do not close the Euclidean gap, rational discs do") {
  const ComplexVector x = vec(2.0, {0.5, 0.0}), y = vec(2.0, {0.0, 0.5});
  const double exact = testsupport::plain_atanh(std::sqrt(7.0) / 4.0);
  const UpperBound affine = kobayashi_upper(x, y, 1, 8);
  CHECK(affine.value >= exact - 1e-12);
  const MetricEstimate e = metric_bracket(x, y, 6, 32);
  CHECK(e.lower <= exact + 1e-9);
  CHECK(e.upper >= exact - 1e-9);
  CHECK(e.gap() < 1e-4);
}

TEST_CASE("property: bracket contains the solver distance") {
  std::mt19937_64 rng(41);
  for (double p : {1.0, 1.5, 3.0}) {
    const auto s = SpaceSignature::lp(2, p);
    for (int k = 0; k < 2; ++k) {
      const ComplexVector x = testsupport::random_point(s, rng, 0.1, 0.8), y = testsupport::random_point(s, rng, 0.1, 0.8);
      const double d = distance(x, y);
      const MetricEstimate e = metric_bracket(x, y, 6, 32, 1);
      CHECK(e.lower <= d + 1e-9);
      CHECK(d <= e.upper + 1e-9);
      CHECK(e.gap() < 1e-4);
    }
  }
}

TEST_CASE("retraction of a geodesic inverts it") {
  std::mt19937_64 rng(42);
  const GeodesicParams g = testsupport::random_admissible(1.5, 3, rng);
  for (cplx z : {cplx(0.0), cplx(0.3, -0.2), cplx(-0.6, 0.5)}) {
    const auto r = retraction_eval(g, eval(g, z));
    REQUIRE(r.has_value());
    CHECK(std::abs(*r - z) < 1e-10);
  }
}

TEST_CASE("inner radius") {
  // disc: radius = 1 - |z|
  const auto d = SpaceSignature::lp(1, 2.0);
  CHECK(inner_radius(ComplexVector(d, {0.3}), ComplexVector(d, {1.0})) == Approx(0.7).epsilon(1e-12));
  // Euclidean ball, orthogonal direction: sqrt(1 - |z|^2)
  const auto e = SpaceSignature::lp(2, 2.0);
  CHECK(inner_radius(ComplexVector(e, {0.6, 0.0}), ComplexVector(e, {0.0, 1.0})) == Approx(0.8).epsilon(1e-12));
  CHECK(inner_radius(ComplexVector(e, {1.0, 0.0}), ComplexVector(e, {0.0, 1.0})) == 0.0);
  CHECK_THROWS_AS(inner_radius(ComplexVector(e, {0.1, 0.0}), ComplexVector(e)), ContractError);
}

TEST_CASE("convexity modulus") {
  for (double p : {1.0, 3.0}) {
    const auto one = SpaceSignature::lp(1, p);
    CHECK(convexity_modulus(one, 0.1).delta_value == Approx(0.1).epsilon(1e-10));
    CHECK(convexity_modulus(one, 0.01).delta_value == Approx(0.01).epsilon(1e-10));
  }
  // l^1_2: the face disc through (1 - eps)/2 (1, 1) in direction (1, -1)/2 gives sqrt(eps (2 - eps))
  const auto l1 = SpaceSignature::lp(2, 1.0);
  const ConvexityModulus m = convexity_modulus(l1, 0.1, 8);
  CHECK(m.delta_value >= std::sqrt(0.19) - 1e-9);
  CHECK(norm(m.z) == Approx(0.9).epsilon(1e-12));
  CHECK(norm(m.v) == Approx(1.0).epsilon(1e-12));
  CHECK(convexity_modulus(l1, 0.05, 8).delta_value <= m.delta_value);
  CHECK_THROWS_AS(convexity_modulus(l1, 0.0), ContractError);
  CHECK_THROWS_AS(convexity_modulus(l1, 1.5), ContractError);
}

TEST_CASE("omega_c sandwich at eps = 0.1 for l^1_2") {
  const auto l1 = SpaceSignature::lp(2, 1.0);
  const double w = omega_c(l1, 0.1, 8).delta_value;
  CHECK(convexity_modulus(l1, 0.05, 8).delta_value <= w + 1e-6);
  CHECK(w <= 2.0 * convexity_modulus(l1, 0.1, 8).delta_value + 1e-6);
}

TEST_CASE("infinitesimal lower bound") {
  const auto d = SpaceSignature::lp(1, 2.0);
  CHECK(infinitesimal_lower(ComplexVector(d, {0.0}), ComplexVector(d, {1.0})) == Approx(0.5).epsilon(1e-10));
  const auto l1 = SpaceSignature::lp(2, 1.0);
  const ComplexVector z(l1, {0.4, 0.3}), v(l1, {0.2, cplx(0, 0.1)});
  const double b = infinitesimal_lower(z, v, 4);
  CHECK(infinitesimal_lower(z, cplx(3.0) * v, 4) == Approx(3.0 * b).epsilon(1e-12));
  CHECK(b <= solve_tangent(z, v).metric() + 1e-9);
  CHECK_THROWS_AS(infinitesimal_lower(ComplexVector(l1, {0.6, 0.5}), v), DomainError);
}

TEST_CASE("curvature is -4") {
  CHECK(curvature(vec(2.0, {0.2, 0.1}), vec(2.0, {1.0, 1.0})).kappa == Approx(-4.0).epsilon(5e-3 / 4));
  CHECK(curvature(vec(2.0, {0.0}), vec(2.0, {1.0})).kappa == Approx(-4.0).epsilon(5e-3 / 4));
  const CurvatureResult c = curvature(vec(1.0, {0.3, cplx(0, -0.2)}), vec(1.0, {0.5, 1.0}));
  CHECK(c.kappa == Approx(-4.0).epsilon(1e-2 / 4));
  CHECK(c.check_gap < 1e-6);
  const auto inf = SpaceSignature::lp(2, Exponent::infinity());
  CHECK_THROWS_AS(curvature(ComplexVector(inf, {0.1, 0.0}), ComplexVector(inf, {1.0, 0.0})), UnsupportedError);
}
