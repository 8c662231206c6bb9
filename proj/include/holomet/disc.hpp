#pragma once

// Poincare disc primitives: hyperbolic distance, infinitesimal metric,
// automorphisms and a circle-mean (generalised) Laplacian.

#include <complex>
#include <functional>

namespace holomet {

using cplx = std::complex<double>;

/// Disc automorphism zeta -> e^{i phase} (zeta - a) / (1 - conj(a) zeta).
struct MobiusMap {
  cplx a{0.0, 0.0};
  double phase = 0.0;

  /// Throws DomainError unless |a| < 1.
  void validate() const;
  MobiusMap inverse() const;
};

/// Relative clamp applied to the pseudo-hyperbolic ratio before tanh^{-1}.
inline constexpr double kTanhClamp = 1.0 - 1e-15;

/// tanh^{-1}(t) for t in [0, 1), clamped at 1 - 1e-15.
double atanh_clamped(double t);

/// Pseudo-hyperbolic ratio |(z - w) / (1 - conj(w) z)|.
double pseudo_hyperbolic(cplx z, cplx w);

/// rho(z, w) = tanh^{-1} |(z - w) / (1 - conj(w) z)|. DomainError if |z| >= 1 or |w| >= 1.
double poincare_distance(cplx z, cplx w);

/// alpha(z, v) = |v| / (1 - |z|^2). DomainError if |z| >= 1.
double poincare_infinitesimal(cplx z, cplx v);

/// e^{i phase} (z - a) / (1 - conj(a) z); defined on the closed disc.
cplx mobius_apply(const MobiusMap& m, cplx z);

using RealField = std::function<double(cplx)>;

/// 4/r^2 * (mean of u over `samples` equispaced points of |zeta - z| = r, minus u(z)).
/// Throws EvaluationError carrying theta when a sample is not finite.
double circle_mean_laplacian(const RealField& u, cplx z, double r, int samples = 256);

/// Circle-mean Laplacian at r in {1e-2, 10^-2.5, 1e-3}, extrapolated to r -> 0 in r^2.
double richardson_laplacian(const RealField& u, cplx z, int samples = 256);

}  // namespace holomet
