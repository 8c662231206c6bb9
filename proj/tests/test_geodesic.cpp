#include <doctest.h>

#include <random>

#include "holomet/disc.hpp"
#include "holomet/errors.hpp"
#include "holomet/geodesic.hpp"
#include "support.hpp"

using namespace holomet;
using doctest::Approx;

namespace {

GeodesicParams first_axis(double p) {
  GeodesicParams g;
  g.p = p;
  g.alpha = {0.0, 0.0};
  g.beta = {1, 0};
  g.c = {1.0, 0.0};
  return g;
}

double max_boundary_dev(const GeodesicParams& g, int samples = 512) {
  double dev = 0.0;
  for (const auto& t : boundary_trace(g, samples)) dev = std::max(dev, std::abs(t.norm - 1.0));
  return dev;
}

}  // namespace

TEST_CASE("linear geodesic") {
  const GeodesicParams g = first_axis(2.0);
  const ComplexVector v = eval(g, 0.3);
  CHECK(std::abs(v[0] - 0.3) < 1e-15);
  CHECK(v[1] == cplx{});
  CHECK(constraint_residuals(g).max_abs() < 1e-15);
  const auto trace = boundary_trace(g, 8);
  REQUIRE(trace.size() == 8);
  for (const auto& t : trace) {
    CHECK(std::abs(t.point[0] - std::polar(1.0, t.theta)) < 1e-15);
    CHECK(t.norm == Approx(1.0));
  }
  const auto s = SpaceSignature::lp(2, 3.0);
  const GeodesicParams lin = linear_geodesic(ComplexVector(s, {cplx(0.0, 1.0), 0.0}));
  CHECK(std::abs(eval(lin, 0.5)[0] - cplx(0.0, 0.5)) < 1e-15);
}

TEST_CASE("Blaschke zero and domain errors") {
  std::mt19937_64 rng(3);
  GeodesicParams g = testsupport::random_admissible(1.5, 3, rng);
  g.beta[1] = 1;
  CHECK(std::abs(eval(g, g.alpha[1])[1]) < 1e-15);
  CHECK_THROWS_AS(eval(g, 1.01), DomainError);
  GeodesicParams bad = g;
  bad.alpha[0] = 1.0;
  bad.beta[0] = 1;
  CHECK_THROWS_AS(eval(bad, 0.2), InvariantViolation);
  bad = g;
  bad.gamma = 1.0;
  CHECK_THROWS_AS(eval(bad, 0.2), InvariantViolation);
}

TEST_CASE("constraint residual closed forms") {
  GeodesicParams g;
  g.p = 1.0;
  const cplx a(0.3, -0.4);
  g.alpha = {a, -a};
  g.beta = {1, 1};
  g.c = {0.5, 0.5};
  const auto r = constraint_residuals(g);
  CHECK(r.scalar_residual == Approx(std::norm(a)).epsilon(1e-14));
  CHECK(std::abs(r.vector_residual) < 1e-15);

  std::mt19937_64 rng(4);
  for (double p : {1.0, 2.0, 3.0}) {
    GeodesicParams h = testsupport::random_admissible(p, 3, rng);
    const double t = 1.2;
    for (auto& c : h.c) c *= t;
    const auto rh = constraint_residuals(h);
    const double tp = std::pow(t, p) - 1.0;
    CHECK(rh.scalar_residual == Approx(tp * (1.0 + std::norm(h.gamma))).epsilon(1e-12));
    CHECK(std::abs(rh.vector_residual - tp * h.gamma) < 1e-12);
  }
}

TEST_CASE("boundary trace gate") {
  GeodesicParams g = first_axis(2.0);
  g.c[0] = std::sqrt(1.1);
  CHECK(constraint_residuals(g).scalar_residual == Approx(0.1));
  try {
    boundary_trace(g, 16);
    FAIL("expected InadmissibleParams");
  } catch (const InadmissibleParams& e) {
    CHECK(e.scalar_residual() == Approx(0.1));
  }
}

TEST_CASE("property: admissible parameters have unit boundary norm") {
  std::mt19937_64 rng(8);
  for (double p : {1.0, 1.5, 2.0, 3.0, 5.0}) {
    for (int k = 0; k < 20; ++k) {
      const GeodesicParams g = testsupport::random_admissible(p, 1 + static_cast<std::size_t>(k % 4), rng, k % 3 == 0);
      CHECK(constraint_residuals(g).max_abs() < 1e-12);
      CHECK(max_boundary_dev(g) < 1e-8);
      CHECK(is_nonconstant(g));
      // interior points lie in the open ball
      CHECK(norm(eval(g, cplx(0.6, -0.5))) < 1.0);
    }
  }
}

TEST_CASE("property: harmonic identity holds at 0 and on the circle iff residuals vanish") {
  std::mt19937_64 rng(9);
  const auto defect = [](const GeodesicParams& g, cplx zeta) {
    double rhs = 0.0;
    for (std::size_t j = 0; j < g.dimension(); ++j) {
      rhs += std::pow(std::abs(g.c[j]), g.p) * (1.0 + std::norm(g.alpha[j]) - 2.0 * (std::conj(g.alpha[j]) * zeta).real());
    }
    return std::abs(1.0 + std::norm(g.gamma) - 2.0 * (std::conj(g.gamma) * zeta).real() - rhs);
  };
  for (int k = 0; k < 20; ++k) {
    GeodesicParams g = testsupport::random_admissible(1.5, 3, rng);
    double worst = 0.0;
    for (cplx zeta : {cplx(0.0), cplx(1.0), cplx(0.0, 1.0), std::polar(1.0, 2.0)}) worst = std::max(worst, defect(g, zeta));
    CHECK(worst < 1e-12);
    g.alpha[0] *= 0.9;  // breaks the vector constraint
    worst = 0.0;
    for (cplx zeta : {cplx(0.0), cplx(1.0), cplx(0.0, 1.0), std::polar(1.0, 2.0)}) worst = std::max(worst, defect(g, zeta));
    CHECK(worst > 1e-6);
  }
}

TEST_CASE("property: reparametrization by automorphisms keeps the boundary on the sphere") {
  std::mt19937_64 rng(10);
  const GeodesicParams g = testsupport::random_admissible(3.0, 3, rng);
  const MobiusMap m{cplx(0.4, 0.3), 0.7};
  for (int k = 0; k < 256; ++k) {
    const cplx zeta = mobius_apply(m, std::polar(1.0, testsupport::kTwoPi * k / 256));
    CHECK(norm(eval(g, zeta / std::abs(zeta))) == Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("property: eval is holomorphic and eval_derivative matches") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> uni(-0.6, 0.6);
  const GeodesicParams g = testsupport::random_admissible(1.5, 3, rng);
  const double h = 1e-4;
  for (int k = 0; k < 10; ++k) {
    const cplx z(uni(rng), uni(rng));
    const ComplexVector dx = cplx(1.0 / (2 * h)) * (eval(g, z + h) - eval(g, z - h));
    const ComplexVector dy = cplx(1.0 / (2 * h)) * (eval(g, z + cplx(0, h)) - eval(g, z - cplx(0, h)));
    const ComplexVector d = eval_derivative(g, z);
    for (std::size_t j = 0; j < 3; ++j) {
      // Cauchy-Riemann: d/dy = i d/dx
      CHECK(std::abs(dy[j] - cplx(0, 1) * dx[j]) < 1e-6);
      CHECK(std::abs(d[j] - dx[j]) < 1e-6);
    }
  }
}

TEST_CASE("canonicalization of vanishing coordinates") {
  const GeodesicParams g =
      admissible_from_weights(2.0, {cplx(0.2, 0.1), cplx(0.5)}, {1.0, 0.0}, {0.0, 0.0}, {1, 1});
  CHECK(g.c[1] == cplx{});
  CHECK(g.alpha[1] == g.gamma);
  CHECK(g.beta[1] == 0);
  CHECK_THROWS_AS(admissible_from_weights(2.0, {0.0}, {-1.0}, {0.0}, {1}), ContractError);
}

TEST_CASE("direct sums") {
  const DirectSumSignature sig{Exponent::of(1.5), 2, Exponent::of(3), 1, Exponent::of(2)};
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    std::vector<cplx> alpha(3);
    std::vector<double> w(3), ph(3);
    for (int j = 0; j < 3; ++j) {
      alpha[j] = std::polar(0.9 * uni(rng), testsupport::kTwoPi * uni(rng));
      w[j] = 0.2 + uni(rng);
      ph[j] = testsupport::kTwoPi * uni(rng);
    }
    const auto g = admissible_direct_sum(sig, alpha, w, ph, {1, 0, 1}, 0.2 + 0.6 * uni(rng));
    CHECK(direct_sum_residuals(g).max_abs() < 1e-12);
    double dev = 0.0;
    for (int m = 0; m < 512; ++m) dev = std::max(dev, std::abs(norm(eval_direct_sum(g, std::polar(1.0, testsupport::kTwoPi * m / 512))) - 1.0));
    CHECK(dev < 1e-8);
    CHECK(norm(eval_direct_sum(g, 0.5)) < 1.0);
  }

  // constant map
  DirectSumGeodesicParams c;
  c.signature = sig;
  c.gamma = 0.3;
  c.block_gamma = {0.3, 0.3};
  c.alpha = {0.3, 0.3, 0.3};
  c.beta = {0, 0, 0};
  c.c = {0.4, 0.2, 0.5};
  CHECK_FALSE(is_nonconstant(c));
}

TEST_CASE("direct sum with an empty second block reduces to the l^p family") {
  std::mt19937_64 rng(14);
  const GeodesicParams g = testsupport::random_admissible(1.5, 2, rng);
  DirectSumGeodesicParams d;
  d.signature = DirectSumSignature{Exponent::of(1.5), 2, Exponent::of(2), 1, Exponent::of(1.5)};
  d.gamma = g.gamma;
  d.block_gamma = {g.gamma, 0.0};
  d.alpha = {g.alpha[0], g.alpha[1], 0.0};
  d.beta = {g.beta[0], g.beta[1], 0};
  d.c = {g.c[0], g.c[1], 0.0};
  const auto r = direct_sum_residuals(d);
  CHECK(r.degenerate[1]);
  CHECK(r.max_abs() < 1e-12);
  for (cplx z : {cplx(0.3, 0.2), cplx(-0.7), std::polar(1.0, 1.0)}) {
    const ComplexVector a = eval(g, z), b = eval_direct_sum(d, z);
    CHECK(std::abs(a[0] - b[0]) < 1e-13);
    CHECK(std::abs(a[1] - b[1]) < 1e-13);
    CHECK(b[2] == cplx{});
  }
}

TEST_CASE("polydisc distance") {
  const auto s = SpaceSignature::lp(2, Exponent::infinity());
  CHECK(polydisc_distance(ComplexVector(s), ComplexVector(s, {0.5, 0.2})) == Approx(0.5493061443).epsilon(1e-10));
  const ComplexVector x(s, {cplx(0.3, 0.1), -0.2});
  CHECK(polydisc_distance(x, x) == 0.0);
  CHECK(polydisc_distance(ComplexVector(s, {0.3, 0.0}), ComplexVector(s, {0.0, 0.3})) ==
        Approx(testsupport::plain_atanh(0.3)).epsilon(1e-14));
  CHECK_THROWS_AS(polydisc_distance(ComplexVector(s, {1.0, 0.0}), x), DomainError);
}
