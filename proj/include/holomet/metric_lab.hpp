#pragma once

// Independent metric estimators on l^p balls.
//
// Lower bounds for the Caratheodory distance come from holomorphic maps into the disc:
// linear functionals of dual norm one, and the left inverses F_psi of admissible geodesics psi,
// where F_psi(z) is the unique zero in the disc of
//
//   G(zeta) = < z - psi(zeta), h(zeta) > = sum_j z_j h_j(zeta) - (zeta - gamma)(1 - conj(gamma) zeta).
//
// Upper bounds for the Kobayashi distance come from explicit discs through both points:
// the affine disc in the complex line through x and y, and rational discs of the
// same shape as the geodesic family fitted to unit boundary norm.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "holomet/geodesic.hpp"
#include "holomet/solver.hpp"

namespace holomet {

struct LowerWitness {
  enum class Kind { none, linear, retraction };
  Kind kind = Kind::none;
  DualFunctional functional;  // kind == linear
  GeodesicParams retraction;  // kind == retraction: the geodesic psi whose left inverse is used
};

struct UpperWitness {
  enum class Kind { none, affine, rational };
  Kind kind = Kind::none;
  /// affine: f(zeta) = center + zeta * radius_vector
  ComplexVector center;
  ComplexVector radius_vector;
  /// rational: geodesic-shaped disc; disc.gamma holds the pole parameter
  GeodesicParams disc;
  /// sampled sup of |f| on the circle plus a second-difference allowance; the disc is divided by it
  double sup_norm = 0.0;
  /// f(u) = x, f(v) = y after rescaling (approximately, see `correction`)
  cplx u{};
  cplx v{};
  /// distance bound charged for moving the fitted endpoints onto x and y
  double correction = 0.0;
};

std::string to_string(LowerWitness::Kind k);
std::string to_string(UpperWitness::Kind k);

struct LowerBound {
  double value = 0.0;
  LowerWitness witness;
};

struct UpperBound {
  double value = 0.0;
  UpperWitness witness;
};

struct MetricEstimate {
  double lower = 0.0;
  double upper = 0.0;
  LowerWitness lower_witness;
  UpperWitness upper_witness;

  double gap() const noexcept { return upper - lower; }
};

/// F_psi(z): the unique zero of G in the open disc. Guessed by the argument principle, polished
/// by Newton; nullopt unless a Newton limit inside the disc has a negligible residual.
std::optional<cplx> retraction_eval(const GeodesicParams& psi, const ComplexVector& z);

/// Best certified rho(F(x), F(y)) over linear functionals and, for finite p, retractions.
/// `hints` are admissible geodesics tried as retractions before the random starts. The search
/// stops once a certified value reaches `stop_at` (a known upper bound).
LowerBound caratheodory_lower(const ComplexVector& x, const ComplexVector& y, int trials, std::uint64_t seed = 0,
                              const std::vector<GeodesicParams>& hints = {},
                              double stop_at = std::numeric_limits<double>::infinity());

/// degree 1: affine discs only. degree >= 2 adds rational discs for finite p. Always a valid
/// upper bound for the Kobayashi distance; the affine disc is the fallback.
UpperBound kobayashi_upper(const ComplexVector& x, const ComplexVector& y, int degree, int trials,
                           std::uint64_t seed = 0);

/// Upper bound first; a rational upper disc with unit boundary norm is passed to the lower
/// bound as a retraction hint.
MetricEstimate metric_bracket(const ComplexVector& x, const ComplexVector& y, int degree = 6, int trials = 32,
                              std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Complex convexity

/// sup{r : max_theta |z + r e^{i theta} v| <= level}. Bracketed on 128 sampled phases, then finished on
/// the 512-sample max with the best phase polished by golden-section search.
double inner_radius(const ComplexVector& z, const ComplexVector& v, double level = 1.0);

struct ConvexityModulus {
  double epsilon = 0.0;
  double delta_value = 0.0;
  ComplexVector z;
  ComplexVector v;
  double r = 0.0;
};

/// delta(eps) = sup{delta(z, v) : |z| >= 1 - eps, |v| = 1}. The sup is attained on |z| = 1 - eps,
/// so only that sphere is searched. 0 < eps <= 1.
ConvexityModulus convexity_modulus(const SpaceSignature& space, double epsilon, int trials = 16,
                                   std::uint64_t seed = 0);

/// sup{|y| : |x + zeta y| <= 1 + eps for |zeta| <= 1} over unit x, computed directly.
ConvexityModulus omega_c(const SpaceSignature& space, double epsilon, int trials = 16, std::uint64_t seed = 0);

struct ModulusRow {
  double epsilon = 0.0;
  double delta = 0.0;
  double omega_c = 0.0;
  /// least-squares slope of log delta against log eps over the rows so far (0 for the first row)
  double slope = 0.0;
};

std::vector<ModulusRow> modulus_sweep(const SpaceSignature& space, const std::vector<double>& epsilons, int trials = 16,
                                      std::uint64_t seed = 0);

/// |v| / (2 delta(1 - |z|)): a lower bound for the infinitesimal Caratheodory metric.
double infinitesimal_lower(const ComplexVector& z, const ComplexVector& v, int trials = 16);

// ---------------------------------------------------------------------------
// Curvature

struct CurvatureResult {
  double kappa = 0.0;
  /// k(x, v) = |v| / mu
  double metric = 0.0;
  /// max relative gap between k(f(z), f'(z)) from independent tangent solves and 1 / (1 - |z|^2)
  double check_gap = 0.0;
};

/// Holomorphic sectional curvature of the Kobayashi metric at (x, v) for l^p, 1 <= p < inf.
/// PrecisionError if the tangent cross-check exceeds 1e-6.
CurvatureResult curvature(const ComplexVector& x, const ComplexVector& v, const SolveConfig& config = {});

}  // namespace holomet
