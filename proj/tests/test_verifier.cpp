#include <doctest.h>

#include <random>

#include "holomet/disc.hpp"
#include "holomet/errors.hpp"
#include "holomet/solver.hpp"
#include "holomet/verifier.hpp"
#include "support.hpp"

using namespace holomet;
using doctest::Approx;
using testsupport::kTwoPi;

namespace {

GeodesicParams first_axis(double p) {
  GeodesicParams g;
  g.p = p;
  g.alpha = {0.0, 0.0};
  g.beta = {1, 0};
  g.c = {1.0, 0.0};
  return g;
}

double origin_oracle_tanh(const ComplexVector& a, const ComplexVector& b) {
  // valid only when one endpoint is 0
  return testsupport::plain_atanh(norm(a.is_zero() ? b : a));
}

}  // namespace

TEST_CASE("dual map of the linear geodesic") {
  const GeodesicParams g = first_axis(2.0);
  for (double theta : {0.0, 1.0, 2.5}) {
    const DualFunctional h = dual_map_eval(g, std::polar(1.0, theta));
    CHECK(std::abs(h.entries[0] - 1.0) < 1e-15);
    CHECK(h.entries[1] == cplx{});
    CHECK(dual_weight(g, theta) == Approx(1.0));
  }
  CHECK(alignment_check(g).max_dev < 1e-14);
}

TEST_CASE("property: boundary alignment of the dual map") {
  std::mt19937_64 rng(31);
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    for (int k = 0; k < 10; ++k) {
      const GeodesicParams g = testsupport::random_admissible(p, 3, rng, k % 2 == 0);
      CHECK(alignment_check(g, 256).max_dev < 1e-8);
      // independent check: e^{i theta} w(theta) N_phi computed from lp_space
      const double theta = 0.77 + k;
      const ComplexVector phi = eval(g, std::polar(1.0, theta));
      const DualFunctional n = support_functional(cplx(1.0 / norm(phi)) * phi);
      const DualFunctional h = dual_map_eval(g, std::polar(1.0, theta));
      for (std::size_t j = 0; j < 3; ++j) {
        if (p == 1.0 && std::abs(phi[j]) < 1e-12) continue;
        CHECK(std::abs(h.entries[j] - std::polar(dual_weight(g, theta), theta) * n.entries[j]) < 1e-8);
      }
      // for p = 1 the dual coefficients are unimodular
      if (p == 1.0) {
        const DualFunctional h0 = dual_map_eval(g, 0.0);
        CHECK(std::isfinite(std::abs(h0.entries[0])));
      }
    }
  }
}

TEST_CASE("dual map rejects inadmissible parameters") {
  GeodesicParams g = first_axis(2.0);
  g.c[0] = 1.1;
  CHECK_THROWS_AS(dual_map_eval(g, 0.3), InadmissibleParams);
}

TEST_CASE("Poisson positivity: constant, shrunk and identical competitors") {
  std::mt19937_64 rng(32);
  const GeodesicParams g = testsupport::random_admissible(1.5, 3, rng);
  const ComplexVector phi0 = eval(g, 0.0);
  const PoissonResult constant = poisson_positivity_check(g, [&](cplx) { return phi0; });
  CHECK(constant.min_real > 0.0);
  CHECK(std::abs(constant.h0_direct - constant.h0_poisson) < 1e-6);
  CHECK(constant.h0_direct.real() > 0.0);
  const PoissonResult shrunk = poisson_positivity_check(g, [&](cplx z) { return eval(g, 0.9 * z); });
  CHECK(shrunk.min_real > 0.0);
  CHECK(shrunk.reconstruction_error < 1e-6);
  const PoissonResult same = poisson_positivity_check(g, as_disc_map(g));
  CHECK(same.equality_case);
  CHECK_THROWS_AS(poisson_positivity_check(g, [&](cplx) { return eval(g, 0.5); }), ContractError);
}

TEST_CASE("property: random polynomial competitors stay inside and give positive H") {
  std::mt19937_64 rng(33);
  for (double p : {1.0, 2.0, 3.0}) {
    const GeodesicParams g = testsupport::random_admissible(p, 2, rng);
    for (int k = 0; k < 5; ++k) {
      const DiscMap comp = random_polynomial_competitor(g, 6, 1e-3, rng);
      CHECK(norm(comp(0.0) - eval(g, 0.0)) < 1e-12);
      double worst = 0.0;
      for (int m = 0; m < 256; ++m) worst = std::max(worst, norm(comp(std::polar(1.0, kTwoPi * m / 256))));
      CHECK(worst < 1.0);
      const PoissonResult r = poisson_positivity_check(g, comp);
      CHECK(r.min_real > 0.0);
      CHECK(r.reconstruction_error < 1e-6);
    }
  }
}

TEST_CASE("Schwarz-Pick certificate") {
  const auto s = SpaceSignature::lp(2, 2.0);
  const GeodesicParams lin = first_axis(2.0);
  CHECK(schwarz_pick_certificate(as_disc_map(lin), {{0.0, 0.5}}, [](const ComplexVector& a, const ComplexVector& b) {
          return testsupport::plain_atanh(norm(a.is_zero() ? b : a));
        }) < 1e-9);
  // zeta -> (zeta^k, 0) is not a geodesic: deficit atanh(0.7) - atanh(0.7^k)
  for (int k = 2; k <= 4; ++k) {
    const DiscMap square = [s, k](cplx z) { return ComplexVector(s, {std::pow(z, k), 0.0}); };
    const double deficit = schwarz_pick_certificate(square, {{0.0, 0.7}}, origin_oracle_tanh);
    CHECK(deficit == Approx(testsupport::plain_atanh(0.7) - testsupport::plain_atanh(std::pow(0.7, k))).epsilon(1e-12));
    CHECK(deficit > 1e-2);
  }
  const DiscMap square = [s](cplx z) { return ComplexVector(s, {z * z, 0.0}); };
  CHECK(schwarz_pick_certificate(square, {{0.0, 0.7}}, origin_oracle_tanh) == Approx(0.33124).epsilon(1e-4));
}

TEST_CASE("Schwarz-Pick certificate on a solver geodesic") {
  const auto s = SpaceSignature::lp(2, 2.0);
  const NormalizedGeodesic g = solve(ComplexVector(s, {0.3, cplx(0, 0.1)}), ComplexVector(s, {-0.2, 0.4}));
  std::vector<std::pair<cplx, cplx>> pairs;
  for (int k = 0; k < 16; ++k) pairs.emplace_back(std::polar(0.05 * k, 0.3 * k), std::polar(0.9 - 0.05 * k, -0.2 * k));
  const DistanceOracle hilbert = [](const ComplexVector& a, const ComplexVector& b) {
    return testsupport::plain_atanh(testsupport::hilbert_ball_tanh(a.entries, b.entries));
  };
  CHECK(schwarz_pick_certificate(as_disc_map(g.params), pairs, hilbert) < 1e-6);
}

TEST_CASE("ray check") {
  const cplx alpha(0.3, 0.2), gamma(-0.1, 0.25);
  const int n = 512;
  std::vector<cplx> f(n), rotated(n), zero(n, cplx{});
  for (int k = 0; k < n; ++k) {
    const cplx z = std::polar(1.0, kTwoPi * k / n);
    const cplx b = (z - alpha) / (1.0 - std::conj(alpha) * z);
    const cplx q = (1.0 - std::conj(alpha) * z) / (1.0 - std::conj(gamma) * z);
    f[k] = 0.7 * b * q * q;
    rotated[k] = std::polar(1.0, kTwoPi / 8) * f[k];
  }
  CHECK(gentili_ray_check(f, gamma));
  CHECK_FALSE(gentili_ray_check(rotated, gamma));
  CHECK(gentili_ray_check(zero, gamma));
}

TEST_CASE("Hoelder exponent fits") {
  CHECK(holder_exponent_estimate(first_axis(2.0), 1.0).slope == Approx(1.0).epsilon(0.02));
  std::mt19937_64 rng(34);
  const HolderFit two = holder_exponent_estimate(testsupport::random_admissible(2.0, 3, rng), 0.5);
  CHECK(two.slope >= 0.45);
  CHECK(two.meets_expected);
  const HolderFit one = holder_exponent_estimate(testsupport::random_admissible(1.0, 3, rng, true), 0.5);
  CHECK(one.slope >= 0.45);
}

TEST_CASE("verify reports inadmissible parameters without throwing") {
  GeodesicParams g = first_axis(2.0);
  CHECK(verify(g).pass());
  g.c[0] = 1.1;
  VerificationReport r;
  CHECK_NOTHROW(r = verify(g));
  CHECK_FALSE(r.pass());
  CHECK_FALSE(r.constraints_pass);
}
