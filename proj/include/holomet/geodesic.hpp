#pragma once

// The explicit family of complex geodesics of l^p balls,
//
//   phi_j(zeta) = c_j B_j(zeta)^{beta_j} ((1 - conj(alpha_j) zeta) / (1 - conj(gamma) zeta))^{2/p},
//   B_j(zeta)   = (zeta - alpha_j) / (1 - conj(alpha_j) zeta),
//
// subject to sum |c_j|^p (1 + |alpha_j|^2) = 1 + |gamma|^2 and sum |c_j|^p alpha_j = gamma,
// together with the two-block variant for l^{p1} (+)_r l^{p2} and the polydisc distance.
//
// All fractional powers use the principal branch. For |zeta| <= 1, |alpha| <= 1 and |gamma| < 1
// both 1 - conj(alpha) zeta and 1 - conj(gamma) zeta lie in the closed right half-plane, so
// their principal logarithms differ by less than pi in argument and
// (num/den)^k = exp(k (Log num - Log den)) is continuous on the closed disc.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "holomet/lp_space.hpp"

namespace holomet {

using DiscMap = std::function<ComplexVector(cplx)>;

struct GeodesicParams {
  double p = 2.0;  // finite exponent >= 1
  cplx gamma{};
  std::vector<cplx> alpha;
  std::vector<std::uint8_t> beta;
  std::vector<cplx> c;

  std::size_t dimension() const noexcept { return c.size(); }
  SpaceSignature space() const { return SpaceSignature::lp(dimension(), p); }

  /// Structural checks: sizes, |gamma| < 1, |alpha_j| <= 1, beta_j in {0,1},
  /// beta_j = 1 only where |alpha_j| < 1. Throws InvariantViolation.
  void validate() const;

  /// Coordinates with c_j = 0 get alpha_j = gamma, beta_j = 0.
  void canonicalize();
};

struct ConstraintResiduals {
  /// |sum |c|^p (1 + |alpha|^2) - (1 + |gamma|^2)|
  double scalar_residual = 0.0;
  /// sum |c|^p alpha - gamma
  cplx vector_residual{};

  double max_abs() const noexcept;
};

/// phi(zeta) for |zeta| <= 1. DomainError for |zeta| > 1.
ComplexVector eval(const GeodesicParams& params, cplx zeta);

/// phi'(zeta) for |zeta| < 1.
ComplexVector eval_derivative(const GeodesicParams& params, cplx zeta);

ConstraintResiduals constraint_residuals(const GeodesicParams& params);

/// Some coordinate with c_j != 0 has beta_j = 1 or alpha_j != gamma.
bool is_nonconstant(const GeodesicParams& params);

/// Residual gate for boundary traces and downstream checks.
inline constexpr double kAdmissibleGate = 1e-8;

struct TracePoint {
  double theta = 0.0;
  ComplexVector point;
  double norm = 0.0;
};

/// Equispaced samples of phi on the unit circle. InadmissibleParams if the
/// constraint residuals exceed `gate`.
std::vector<TracePoint> boundary_trace(const GeodesicParams& params, int samples, double gate = kAdmissibleGate);

/// zeta -> zeta * u for a unit vector u (gamma = 0, alpha = 0, beta = 1 on the support of u).
GeodesicParams linear_geodesic(const ComplexVector& unit_direction);

/// Builds an admissible parameter set from free data: positions alpha_j (closed disc),
/// positive weights w_j and phases. The weights are rescaled by the unique t > 0 that
/// satisfies both constraints with |gamma| < 1; then gamma = t sum w_j alpha_j and
/// c_j = (t w_j)^{1/p} e^{i phase_j}.
GeodesicParams admissible_from_weights(double p, const std::vector<cplx>& alpha, const std::vector<double>& weights,
                                       const std::vector<double>& phases, const std::vector<std::uint8_t>& beta);

/// The geodesic viewed as a DiscMap (captures a copy of the parameters).
DiscMap as_disc_map(const GeodesicParams& params);

// ---------------------------------------------------------------------------
// Two-block direct sums

struct DirectSumGeodesicParams {
  DirectSumSignature signature;
  cplx gamma{};
  std::array<cplx, 2> block_gamma{};
  std::vector<cplx> alpha;  // n1 + n2 entries, block 1 first
  std::vector<std::uint8_t> beta;
  std::vector<cplx> c;

  SpaceSignature space() const;
  void validate() const;
};

struct DirectSumResiduals {
  /// sum_j |c_ij|^{p_i} alpha_ij - gamma_i c_i^{p_i}, per block.
  std::array<cplx, 2> block_vector{};
  /// c_1^r gamma_1 + c_2^r gamma_2 - gamma
  cplx outer_vector{};
  /// c_1^r (1 + |gamma_1|^2) + c_2^r (1 + |gamma_2|^2) - (1 + |gamma|^2)
  double outer_scalar = 0.0;
  /// c_i from the block-normalisation formula.
  std::array<double, 2> block_scale{};
  /// Blocks with c_i = 0; excluded from block_vector.
  std::array<bool, 2> degenerate{};

  double max_abs() const noexcept;
};

ComplexVector eval_direct_sum(const DirectSumGeodesicParams& params, cplx zeta);
ComplexVector eval_direct_sum_derivative(const DirectSumGeodesicParams& params, cplx zeta);
DirectSumResiduals direct_sum_residuals(const DirectSumGeodesicParams& params);
bool is_nonconstant(const DirectSumGeodesicParams& params);

/// Admissible direct-sum parameters from free data: per-coordinate alpha, weights, phases,
/// and the split `mix` in (0,1) of the outer weights between the two blocks.
DirectSumGeodesicParams admissible_direct_sum(const DirectSumSignature& sig, const std::vector<cplx>& alpha,
                                              const std::vector<double>& weights, const std::vector<double>& phases,
                                              const std::vector<std::uint8_t>& beta, double mix);

// ---------------------------------------------------------------------------
// Polydisc

/// max_j rho(x_j, y_j) on the unit polydisc (l^inf signature). DomainError outside.
double polydisc_distance(const ComplexVector& x, const ComplexVector& y);

}  // namespace holomet
