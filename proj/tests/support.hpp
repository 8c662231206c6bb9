#pragma once

// Test-side oracles and random generators. Everything here is written against the
// definitions directly and shares no code with the library beyond the value types.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "holomet/geodesic.hpp"
#include "holomet/lp_space.hpp"

namespace testsupport {

using holomet::ComplexVector;
using holomet::cplx;
using holomet::SpaceSignature;

inline constexpr double kTwoPi = 6.283185307179586;

inline double plain_lp_norm(const std::vector<cplx>& z, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (cplx e : z) m = std::max(m, std::abs(e));
    return m;
  }
  double s = 0.0;
  for (cplx e : z) s += std::pow(std::abs(e), p);
  return std::pow(s, 1.0 / p);
}

inline double plain_atanh(double t) { return 0.5 * std::log((1.0 + t) / (1.0 - t)); }

inline cplx hermitian(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s{};
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * std::conj(b[j]);
  return s;
}

/// Ball automorphism of the Euclidean unit ball sending a to 0:
/// phi_a(z) = (a - P_a z - sqrt(1 - |a|^2) Q_a z) / (1 - <z, a>).
inline std::vector<cplx> ball_automorphism(const std::vector<cplx>& a, const std::vector<cplx>& z) {
  const double aa = std::real(hermitian(a, a));
  const cplx za = hermitian(z, a);
  const double s = std::sqrt(1.0 - aa);
  std::vector<cplx> out(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    const cplx pz = aa == 0.0 ? cplx{} : za / aa * a[j];
    const cplx qz = z[j] - pz;
    out[j] = (a[j] - pz - s * qz) / (1.0 - za);
  }
  return out;
}

/// tanh of the Caratheodory distance of the Euclidean ball: |phi_x(y)|.
inline double hilbert_ball_tanh(const std::vector<cplx>& x, const std::vector<cplx>& y) {
  return plain_lp_norm(ball_automorphism(x, y), 2.0);
}

inline double polydisc_oracle(const std::vector<cplx>& x, const std::vector<cplx>& y) {
  double m = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    m = std::max(m, plain_atanh(std::abs((x[j] - y[j]) / (1.0 - std::conj(y[j]) * x[j]))));
  }
  return m;
}

inline std::vector<cplx> gaussian_entries(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> e(n);
  for (auto& v : e) v = {g(rng), g(rng)};
  return e;
}

/// Random point of the p-ball with norm uniform in [lo, hi].
inline ComplexVector random_point(const SpaceSignature& space, std::mt19937_64& rng, double lo = 0.05,
                                  double hi = 0.9) {
  std::uniform_real_distribution<double> uni(lo, hi);
  ComplexVector x(space, gaussian_entries(space.dimension(), rng));
  return cplx(uni(rng) / holomet::norm(x)) * x;
}

inline ComplexVector random_unit(const SpaceSignature& space, std::mt19937_64& rng) {
  ComplexVector x(space, gaussian_entries(space.dimension(), rng));
  return cplx(1.0 / holomet::norm(x)) * x;
}


/// Random admissible geodesic parameters. With `boundary_alpha` and n > 1, one coordinate gets |alpha| = 1, beta = 0.
inline holomet::GeodesicParams random_admissible(double p, std::size_t n, std::mt19937_64& rng,
                                                 bool boundary_alpha = false) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<cplx> alpha(n);
  std::vector<double> w(n), ph(n);
  std::vector<std::uint8_t> beta(n);
  for (std::size_t j = 0; j < n; ++j) {
    alpha[j] = std::polar(0.95 * std::sqrt(uni(rng)), kTwoPi * uni(rng));
    w[j] = 0.1 + uni(rng);
    ph[j] = kTwoPi * uni(rng);
    beta[j] = uni(rng) < 0.6 ? 1 : 0;
  }
  if (n == 1) beta[0] = 1;  // a single beta = 0 coordinate is forced to be constant
  if (boundary_alpha && n > 1) {
    alpha[0] = std::polar(1.0, kTwoPi * uni(rng));
    beta[0] = 0;
  }
  return holomet::admissible_from_weights(p, alpha, w, ph, beta);
}

}  // namespace testsupport
